#pragma once

#include "gepase/bench.hpp"
#include "gepase/core/be_queue.hpp"
#include "gepase/core/independence.hpp"
#include "gepase/core/open_queue.hpp"
#include "gepase/core/state_table.hpp"
#include "gepase/core/types.hpp"
#include "gepase/domain.hpp"
#include "gepase/executor.hpp"
#include "gepase/grid2d.hpp"
#include "gepase/planners.hpp"
