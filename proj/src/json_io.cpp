#include "carnot/rational.hpp"
