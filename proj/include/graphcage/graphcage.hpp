#pragma once

#include "graphcage/types.hpp"
#include "graphcage/csr_graph.hpp"
#include "graphcage/io.hpp"
#include "graphcage/generate.hpp"
#include "graphcage/blocked_graph.hpp"
#include "graphcage/gcb_format.hpp"
#include "graphcage/schedule.hpp"
#include "graphcage/access_trace.hpp"
#include "graphcage/kernels.hpp"
#include "graphcage/pagerank.hpp"
#include "graphcage/spmv.hpp"
#include "graphcage/traversal.hpp"
#include "graphcage/cache_model.hpp"
#include "graphcage/trace_kernels.hpp"
