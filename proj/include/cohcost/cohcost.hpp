#pragma once

#include "cohcost/bounds.hpp"
#include "cohcost/checks.hpp"
#include "cohcost/errors.hpp"
#include "cohcost/gaussian.hpp"
#include "cohcost/implementation.hpp"
#include "cohcost/measures.hpp"
#include "cohcost/model_io.hpp"
#include "cohcost/numerics.hpp"
#include "cohcost/quantum.hpp"
#include "cohcost/random.hpp"
