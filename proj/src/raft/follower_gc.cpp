#include "blade/raft/follower_gc.hpp"
