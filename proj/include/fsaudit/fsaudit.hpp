#ifndef FSAUDIT_FSAUDIT_HPP_
#define FSAUDIT_FSAUDIT_HPP_
#pragma once

#include "fsaudit/common.hpp"
#include "fsaudit/dataset.hpp"
#include "fsaudit/samplesize.hpp"
#include "fsaudit/classifiers.hpp"
#include "fsaudit/rankers.hpp"
#include "fsaudit/estimators.hpp"
#include "fsaudit/selectors.hpp"
#include "fsaudit/harness.hpp"
#include "fsaudit/stats.hpp"
#include "fsaudit/report.hpp"

#endif  // FSAUDIT_FSAUDIT_HPP_
