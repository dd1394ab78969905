#pragma once

#include "dirstat/core.hpp"
#include "dirstat/errors.hpp"
#include "dirstat/frames.hpp"
#include "dirstat/io.hpp"
#include "dirstat/numerics.hpp"
#include "dirstat/order.hpp"
#include "dirstat/quadrature.hpp"
#include "dirstat/random.hpp"
#include "dirstat/uniformity.hpp"
#include "dirstat/watson.hpp"
