#pragma once

#include "rangeq/algebra.hpp"
#include "rangeq/box.hpp"
#include "rangeq/counters.hpp"
#include "rangeq/dense_tensor.hpp"
#include "rangeq/grid2d.hpp"
#include "rangeq/matmul.hpp"
#include "rangeq/ndtree.hpp"
#include "rangeq/quadtree.hpp"
#include "rangeq/registry.hpp"
#include "rangeq/scalar.hpp"
#include "rangeq/segtree1d.hpp"
#include "rangeq/workload.hpp"
#include "rangeq/zero_tracked.hpp"
