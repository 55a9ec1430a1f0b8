#pragma once

#include "cylflow/bounds.hpp"
#include "cylflow/commands.hpp"
#include "cylflow/config.hpp"
#include "cylflow/dynamics.hpp"
#include "cylflow/energetics.hpp"
#include "cylflow/equilibria.hpp"
#include "cylflow/flow.hpp"
#include "cylflow/io.hpp"
#include "cylflow/kernel.hpp"
#include "cylflow/pipeline.hpp"
#include "cylflow/report.hpp"
#include "cylflow/spectral.hpp"
