#pragma once

#include "dog/chain_tracker.hpp"
#include "dog/dataset.hpp"
#include "dog/decoder.hpp"
#include "dog/error.hpp"
#include "dog/kg_store.hpp"
#include "dog/metrics.hpp"
#include "dog/prompt.hpp"
#include "dog/scorer.hpp"
#include "dog/text.hpp"
#include "dog/token_space.hpp"
#include "dog/trie.hpp"
