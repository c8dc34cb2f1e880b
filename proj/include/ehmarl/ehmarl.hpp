#pragma once

#include "ehmarl/approx/attention.hpp"
#include "ehmarl/approx/categorical.hpp"
#include "ehmarl/approx/checkpoint.hpp"
#include "ehmarl/approx/mlp.hpp"
#include "ehmarl/approx/optimizer.hpp"
#include "ehmarl/approx/params.hpp"
#include "ehmarl/baselines/compare.hpp"
#include "ehmarl/baselines/ladder.hpp"
#include "ehmarl/baselines/oracle.hpp"
#include "ehmarl/core/errors.hpp"
#include "ehmarl/core/random.hpp"
#include "ehmarl/core/text.hpp"
#include "ehmarl/data/profile.hpp"
#include "ehmarl/data/scenario_io.hpp"
#include "ehmarl/data/series_io.hpp"
#include "ehmarl/env/park.hpp"
#include "ehmarl/env/physics.hpp"
#include "ehmarl/env/types.hpp"
#include "ehmarl/marl/actors.hpp"
#include "ehmarl/marl/config.hpp"
#include "ehmarl/marl/critic.hpp"
#include "ehmarl/marl/evaluate.hpp"
#include "ehmarl/marl/losses.hpp"
#include "ehmarl/marl/replay.hpp"
#include "ehmarl/marl/trainer.hpp"
