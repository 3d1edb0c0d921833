#pragma once

#include "rlct/blowup.hpp"
#include "rlct/builders.hpp"
#include "rlct/compiled.hpp"
#include "rlct/error.hpp"
#include "rlct/io.hpp"
#include "rlct/matrix.hpp"
#include "rlct/model.hpp"
#include "rlct/obs_series.hpp"
#include "rlct/observable.hpp"
#include "rlct/rational.hpp"
#include "rlct/report.hpp"
#include "rlct/rlct_core.hpp"
#include "rlct/series.hpp"
#include "rlct/upoly.hpp"
#include "rlct/verifier.hpp"
#include "rlct/volume.hpp"
