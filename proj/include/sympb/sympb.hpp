#pragma once

#include "sympb/bottleneck_geometry.hpp"
#include "sympb/ensemble_experiments.hpp"
#include "sympb/error.hpp"
#include "sympb/linear_evolution.hpp"
#include "sympb/normal_form_models.hpp"
#include "sympb/random.hpp"
#include "sympb/symplectic_linalg.hpp"
#include "sympb/trajectory_integration.hpp"
