#include <doctest.h>
#include "genstore/seqio.hpp"
TEST_CASE("smoke") { CHECK(genstore::seqio::base_code('A') == 0); }
