#include "gsep/windows.hpp"
