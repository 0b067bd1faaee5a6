#pragma once

#include "finiteroc/design.hpp"
#include "finiteroc/errors.hpp"
#include "finiteroc/experiment.hpp"
#include "finiteroc/io.hpp"
#include "finiteroc/merge.hpp"
#include "finiteroc/model.hpp"
#include "finiteroc/posterior.hpp"
#include "finiteroc/random.hpp"
#include "finiteroc/ratio.hpp"
#include "finiteroc/sort_bound.hpp"
#include "finiteroc/subset.hpp"
