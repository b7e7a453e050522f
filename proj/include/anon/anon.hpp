#pragma once

#include "anon/anon_solver.hpp"
#include "anon/discretizer.hpp"
#include "anon/error.hpp"
#include "anon/game.hpp"
#include "anon/max_flow.hpp"
#include "anon/minimax.hpp"
#include "anon/multinomial.hpp"
#include "anon/normal_form.hpp"
#include "anon/parallel.hpp"
#include "anon/partition.hpp"
#include "anon/rational.hpp"
#include "anon/tdp.hpp"
#include "anon/tv_lab.hpp"
