#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sympb/error.hpp"
#include "sympb/normal_form_models.hpp"
#include "sympb/symplectic_linalg.hpp"

/**
 * \file io.hpp
 *
 * @brief File formats: matrices (CSV or JSON arrays of arrays), normal-form coefficient tables, Eckart-Morse
 * parameters, and result tables written as CSV with a provenance comment or as JSON.
 */

namespace sympb::io {

  using json = nlohmann::json;

  /// 17 significant digits, enough to round-trip any double.
  inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  inline std::string read_text(std::filesystem::path const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw IoError("cannot open '" + path.string() + "'");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  inline json parse_json(std::string const& text, std::string const& origin) {
    try {
      return json::parse(text);
    } catch (json::exception const& e) {
      throw ParseError(origin + ": " + e.what());
    }
  }

  // ---------------------------------------------------------------------------------------------------------------
  // Matrices

  inline Matrix matrix_from_json(json const& j) {
    if (!j.is_array() || j.empty()) {
      throw ParseError("matrix JSON must be a non-empty array of arrays");
    }
    auto rows = static_cast<Eigen::Index>(j.size());
    auto cols = static_cast<Eigen::Index>(j.front().is_array() ? j.front().size() : 0);
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      json const& row = j[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
        throw ParseError("matrix row " + std::to_string(r) + " has the wrong length");
      }
      for (Eigen::Index c = 0; c < cols; ++c) {
        json const& v = row[static_cast<std::size_t>(c)];
        if (!v.is_number()) {
          throw ParseError("matrix entry (" + std::to_string(r) + ", " + std::to_string(c) + ") is not a number");
        }
        m(r, c) = v.get<double>();
      }
    }
    return m;
  }

  /// One row per line, entries separated by commas and/or whitespace. Blank lines and '#' comments are skipped.
  inline Matrix matrix_from_csv(std::string const& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) {
        line.erase(hash);
      }
      for (char& ch : line) {
        if (ch == ',' || ch == ';') {
          ch = ' ';
        }
      }
      std::istringstream fields(line);
      std::vector<double> row;
      std::string tok;
      while (fields >> tok) {
        try {
          std::size_t used = 0;
          row.push_back(std::stod(tok, &used));
          if (used != tok.size()) {
            throw ParseError("");
          }
        } catch (std::exception const&) {
          throw ParseError("matrix CSV: '" + tok + "' is not a number");
        }
      }
      if (!row.empty()) {
        rows.push_back(std::move(row));
      }
    }
    if (rows.empty()) {
      throw ParseError("matrix CSV is empty");
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows.front().size()) {
        throw ParseError("matrix CSV row " + std::to_string(r) + " has the wrong length");
      }
      for (std::size_t c = 0; c < rows[r].size(); ++c) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
      }
    }
    return m;
  }

  /// Reads a matrix file; JSON is detected by a leading '['.
  inline Matrix read_matrix(std::filesystem::path const& path) {
    std::string text = read_text(path);
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
      return matrix_from_json(parse_json(text, path.string()));
    }
    return matrix_from_csv(text);
  }

  inline json matrix_to_json(Matrix const& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        row.push_back(m(r, c));
      }
      out.push_back(std::move(row));
    }
    return out;
  }

  inline void write_matrix_csv(std::ostream& os, Matrix const& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        os << (c ? "," : "") << format_double(m(r, c));
      }
      os << '\n';
    }
  }

  // ---------------------------------------------------------------------------------------------------------------
  // Normal-form coefficient tables

  namespace detail {

    inline CnfTerm term_from_json(json const& t) {
      if (!t.contains("i") || !t.contains("j") || !t.contains("c")) {
        throw ParseError("normal-form term needs keys \"i\", \"j\" and \"c\"");
      }
      try {
        return CnfTerm{t.at("i").get<int>(), t.at("j").get<std::vector<int>>(), t.at("c").get<double>()};
      } catch (json::exception const& e) {
        throw ParseError(std::string("normal-form term: ") + e.what());
      }
    }

  }  // namespace detail

  /**
   * @brief Builds a normal form from either ``{"e0": x, "terms": [{"i":..,"j":[..],"c":..}, ...]}`` or a flat list
   * of term objects that includes one ``{"e0": x}`` entry.
   */
  inline CnfModel cnf_from_json(json const& doc) {
    std::optional<double> e0;
    std::vector<CnfTerm> terms;
    auto take_e0 = [&](json const& v) {
      if (!v.is_number()) {
        throw ParseError("normal form: \"e0\" must be a number");
      }
      e0 = v.get<double>();
    };
    if (doc.is_object()) {
      if (doc.contains("e0")) {
        take_e0(doc.at("e0"));
      }
      if (!doc.contains("terms") || !doc.at("terms").is_array()) {
        throw ParseError("normal form object needs a \"terms\" array");
      }
      for (json const& t : doc.at("terms")) {
        terms.push_back(detail::term_from_json(t));
      }
    } else if (doc.is_array()) {
      for (json const& t : doc) {
        if (t.is_object() && t.contains("e0") && !t.contains("c")) {
          take_e0(t.at("e0"));
        } else {
          terms.push_back(detail::term_from_json(t));
        }
      }
    } else {
      throw ParseError("normal form JSON must be an object or an array");
    }
    if (terms.empty()) {
      throw ParseError("normal form has no terms");
    }
    std::size_t nb = terms.front().j_powers.size();
    if (!e0) {
      for (CnfTerm const& t : terms) {
        bool constant = t.i_power == 0 && std::all_of(t.j_powers.begin(), t.j_powers.end(), [](int p) { return p == 0; });
        if (constant) {
          e0 = t.coeff;
        }
      }
    }
    if (!e0) {
      throw ParseError("normal form is missing \"e0\"");
    }
    return CnfModel(*e0, nb, std::move(terms));
  }

  inline CnfModel read_cnf(std::filesystem::path const& path) {
    return cnf_from_json(parse_json(read_text(path), path.string()));
  }

  inline json cnf_to_json(CnfModel const& model) {
    json terms = json::array();
    for (CnfTerm const& t : model.terms()) {
      terms.push_back({{"i", t.i_power}, {"j", t.j_powers}, {"c", t.coeff}});
    }
    return {{"e0", model.e0()}, {"terms", std::move(terms)}};
  }

  // ---------------------------------------------------------------------------------------------------------------
  // Eckart-Morse parameters

  /**
   * @brief Reads m, eps, A, B, a, x0, De, aM. Missing keys keep their defaults; ``De``/``aM`` accept a number (both
   * modes) or a two-element array; a missing ``x0`` or ``"barrier-centered"`` places the barrier top at x = 0.
   */
  inline EckartMorseParams params_from_json(json const& doc) {
    if (!doc.is_object()) {
      throw ParseError("Eckart-Morse parameters must be a JSON object");
    }
    EckartMorseParams p;
    try {
      auto get = [&](char const* key, double& field) {
        if (doc.contains(key)) {
          field = doc.at(key).get<double>();
        }
      };
      get("m", p.m);
      get("eps", p.eps);
      get("A", p.A);
      get("B", p.B);
      get("a", p.a);
      auto get_pair = [&](char const* key, std::array<double, 2>& field) {
        if (!doc.contains(key)) {
          return;
        }
        json const& v = doc.at(key);
        if (v.is_number()) {
          field = {v.get<double>(), v.get<double>()};
        } else {
          auto list = v.get<std::vector<double>>();
          if (list.size() != 2) {
            throw ParseError(std::string("\"") + key + "\" must have one entry per bath mode (y, z)");
          }
          field = {list[0], list[1]};
        }
      };
      get_pair("De", p.De);
      get_pair("aM", p.aM);
      bool centred = !doc.contains("x0") || (doc.at("x0").is_string() && doc.at("x0") == "barrier-centered");
      if (centred) {
        p.x0 = barrier_centered_x0(p.A, p.B, p.a);
      } else {
        p.x0 = doc.at("x0").get<double>();
      }
    } catch (json::exception const& e) {
      throw ParseError(std::string("Eckart-Morse parameters: ") + e.what());
    }
    p.validate();
    return p;
  }

  inline EckartMorseParams read_params(std::filesystem::path const& path) {
    return params_from_json(parse_json(read_text(path), path.string()));
  }

  inline json params_to_json(EckartMorseParams const& p) {
    return {{"m", p.m},   {"eps", p.eps}, {"A", p.A},   {"B", p.B},
            {"a", p.a},   {"x0", p.x0},   {"De", p.De}, {"aM", p.aM}};
  }

  // ---------------------------------------------------------------------------------------------------------------
  // Result tables

  using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

  struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
  };

  inline std::string cell_text(Cell const& c) {
    return std::visit(
        [](auto const& v) -> std::string {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            return format_double(v);
          } else if constexpr (std::is_same_v<T, std::string>) {
            return v;
          } else {
            return std::to_string(v);
          }
        },
        c);
  }

  inline json cell_json(Cell const& c) {
    return std::visit([](auto const& v) -> json { return v; }, c);
  }

  /// CSV with a leading ``# config: {...}`` provenance line.
  inline void write_csv(std::ostream& os, Table const& t, json const& provenance) {
    os << "# config: " << provenance.dump() << '\n';
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      os << (c ? "," : "") << t.columns[c];
    }
    os << '\n';
    for (auto const& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        os << (c ? "," : "") << cell_text(row[c]);
      }
      os << '\n';
    }
  }

  inline json table_to_json(Table const& t, json const& provenance) {
    json rows = json::array();
    for (auto const& row : t.rows) {
      json obj = json::object();
      for (std::size_t c = 0; c < row.size() && c < t.columns.size(); ++c) {
        obj[t.columns[c]] = cell_json(row[c]);
      }
      rows.push_back(std::move(obj));
    }
    return {{"config", provenance}, {"rows", std::move(rows)}};
  }

}  // namespace sympb::io
