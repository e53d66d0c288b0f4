#pragma once

#include "alselect/clustering.hpp"
#include "alselect/corpus.hpp"
#include "alselect/criteria.hpp"
#include "alselect/editseq.hpp"
#include "alselect/error.hpp"
#include "alselect/lm_scores.hpp"
#include "alselect/log.hpp"
#include "alselect/matcher.hpp"
#include "alselect/report.hpp"
#include "alselect/simulator.hpp"
#include "alselect/strategies.hpp"
#include "alselect/synthetic.hpp"
#include "alselect/version.hpp"
