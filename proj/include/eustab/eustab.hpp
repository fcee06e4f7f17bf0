#pragma once

#include "eustab/accounting.hpp"
#include "eustab/dataset.hpp"
#include "eustab/error.hpp"
#include "eustab/expfit.hpp"
#include "eustab/format.hpp"
#include "eustab/numeric.hpp"
#include "eustab/regions.hpp"
#include "eustab/report.hpp"
#include "eustab/stability.hpp"
#include "eustab/student_t.hpp"
