#pragma once

#include "qwalk/backend/engine.hpp"
#include "qwalk/backend/types.hpp"
#include "qwalk/coined.hpp"
#include "qwalk/ctqw.hpp"
#include "qwalk/error.hpp"
#include "qwalk/graphs.hpp"
#include "qwalk/walk_state.hpp"
