#pragma once

#include "hyperbc/chamber.hpp"
#include "hyperbc/checks.hpp"
#include "hyperbc/convolution.hpp"
#include "hyperbc/empirical_measure.hpp"
#include "hyperbc/errors.hpp"
#include "hyperbc/linalg.hpp"
#include "hyperbc/matrix_kernel.hpp"
#include "hyperbc/parallel.hpp"
#include "hyperbc/quadrature.hpp"
#include "hyperbc/random.hpp"
#include "hyperbc/sampling.hpp"
#include "hyperbc/special_functions.hpp"
#include "hyperbc/statistics.hpp"
