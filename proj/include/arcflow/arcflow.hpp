#pragma once

#include "arcflow/arc_field.hpp"
#include "arcflow/diagnostics.hpp"
#include "arcflow/error.hpp"
#include "arcflow/expression.hpp"
#include "arcflow/flow.hpp"
#include "arcflow/l2/control.hpp"
#include "arcflow/l2/hermite.hpp"
#include "arcflow/metric.hpp"
#include "arcflow/spaces/euclidean.hpp"
#include "arcflow/spaces/grid_function.hpp"
#include "arcflow/spaces/hausdorff.hpp"
#include "arcflow/surface.hpp"
#include "arcflow/tangency.hpp"
