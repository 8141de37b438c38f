#pragma once

// Umbrella header for the closed-loop experience engine.

#include "exloop/curation.hpp"
#include "exloop/errors.hpp"
#include "exloop/experience_base.hpp"
#include "exloop/grpo.hpp"
#include "exloop/harness.hpp"
#include "exloop/http_providers.hpp"
#include "exloop/prompts.hpp"
#include "exloop/providers.hpp"
#include "exloop/retrieval.hpp"
#include "exloop/reward.hpp"
#include "exloop/stub_providers.hpp"
#include "exloop/trajectory.hpp"
