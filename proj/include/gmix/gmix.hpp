#pragma once

#include "gmix/numerics.hpp"
#include "gmix/random.hpp"
#include "gmix/estimate.hpp"
#include "gmix/majorization.hpp"
#include "gmix/mixtures.hpp"
#include "gmix/weighted_sums.hpp"
#include "gmix/report.hpp"
#include "gmix/entropy.hpp"
#include "gmix/convex.hpp"
#include "gmix/lpball.hpp"
#include "gmix/verify.hpp"
