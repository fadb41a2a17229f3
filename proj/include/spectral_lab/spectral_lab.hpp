#pragma once

#include "spectral_lab/complex_experiments.hpp"
#include "spectral_lab/errors.hpp"
#include "spectral_lab/lp_operators.hpp"
#include "spectral_lab/majorization.hpp"
#include "spectral_lab/parallel.hpp"
#include "spectral_lab/pencils.hpp"
#include "spectral_lab/polynomial.hpp"
#include "spectral_lab/roots.hpp"
