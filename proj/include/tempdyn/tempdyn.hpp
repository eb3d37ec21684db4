#pragma once

// Convenience header for the analysis library. The network client and the
// command pipeline (tempdyn/ghcn/fetch.hpp, tempdyn/pipeline.hpp) are
// included separately.

#include "tempdyn/calendar.hpp"
#include "tempdyn/config.hpp"
#include "tempdyn/density.hpp"
#include "tempdyn/ghcn/dly.hpp"
#include "tempdyn/ghcn/ingest.hpp"
#include "tempdyn/linreg.hpp"
#include "tempdyn/models.hpp"
#include "tempdyn/report.hpp"
#include "tempdyn/series.hpp"
