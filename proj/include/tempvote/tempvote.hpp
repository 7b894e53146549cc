#pragma once

#include "tempvote/audit.hpp"
#include "tempvote/error.hpp"
#include "tempvote/fixtures.hpp"
#include "tempvote/io.hpp"
#include "tempvote/model.hpp"
#include "tempvote/pom.hpp"
#include "tempvote/rational.hpp"
#include "tempvote/rule.hpp"
#include "tempvote/strategy.hpp"
