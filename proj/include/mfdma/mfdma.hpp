#ifndef MFDMA_MFDMA_HPP
#define MFDMA_MFDMA_HPP

#include "mfdma/core.hpp"
#include "mfdma/detrend.hpp"
#include "mfdma/traditional.hpp"
#include "mfdma/direct.hpp"
#include "mfdma/analysis.hpp"
#include "mfdma/synth.hpp"
#include "mfdma/ingest.hpp"
#include "mfdma/io.hpp"
#include "mfdma/report.hpp"
#include "mfdma/bench.hpp"

#endif  // MFDMA_MFDMA_HPP
