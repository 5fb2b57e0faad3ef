#pragma once

#include "ggame/apriori.hpp"
#include "ggame/equilibria.hpp"
#include "ggame/families.hpp"
#include "ggame/game.hpp"
#include "ggame/io.hpp"
#include "ggame/markov.hpp"
#include "ggame/rational.hpp"
