#ifndef VACSIM_VACSIM_HPP
#define VACSIM_VACSIM_HPP

#include "constants.hpp"
#include "dispersion.hpp"
#include "eo_grid.hpp"
#include "eo_model.hpp"
#include "evolution.hpp"
#include "mode_algebra.hpp"
#include "operator_forms.hpp"
#include "quadrature.hpp"
#include "scan.hpp"
#include "udw_detector.hpp"

#endif  // VACSIM_VACSIM_HPP
