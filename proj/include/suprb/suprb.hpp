#pragma once

#include "composition.hpp"
#include "config.hpp"
#include "data.hpp"
#include "discovery.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "fitness.hpp"
#include "learner.hpp"
#include "mixing.hpp"
#include "persistence.hpp"
#include "random.hpp"
#include "rule.hpp"
#include "stats.hpp"
