#pragma once

#include "lagdeconv/baselines.hpp"
#include "lagdeconv/coeff_vector.hpp"
#include "lagdeconv/coeffs.hpp"
#include "lagdeconv/convolution.hpp"
#include "lagdeconv/deconvolve.hpp"
#include "lagdeconv/error.hpp"
#include "lagdeconv/grid.hpp"
#include "lagdeconv/laguerre.hpp"
#include "lagdeconv/parallel.hpp"
#include "lagdeconv/quadrature.hpp"
#include "lagdeconv/simbench.hpp"
#include "lagdeconv/stats.hpp"
#include "lagdeconv/toeplitz.hpp"
