#pragma once

#include "aprabe/algebra.hpp"
#include "aprabe/attrspace.hpp"
#include "aprabe/bilinear.hpp"
#include "aprabe/lsss.hpp"
#include "aprabe/policy.hpp"
#include "aprabe/scheme.hpp"
#include "aprabe/store.hpp"
#include "aprabe/complexity.hpp"
#include "aprabe/io.hpp"
