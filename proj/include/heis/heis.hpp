#pragma once

#include "heis/core.hpp"
#include "heis/curves.hpp"
#include "heis/error.hpp"
#include "heis/io.hpp"
#include "heis/measure.hpp"
#include "heis/path.hpp"
#include "heis/reifenberg.hpp"
#include "heis/stieltjes.hpp"
#include "heis/subdivision.hpp"
#include "heis/summation.hpp"
#include "heis/surfaces.hpp"
