#pragma once
// Umbrella header for the whole library.

#include "mih/codes.hpp"
#include "mih/costmodel.hpp"
#include "mih/enumerate.hpp"
#include "mih/index.hpp"
#include "mih/io.hpp"
#include "mih/optimize.hpp"
#include "mih/scan.hpp"
#include "mih/table.hpp"
