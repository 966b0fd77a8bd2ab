#include <gtest/gtest.h>

#include "certificate_audit.hpp"

namespace {

// Fails the run if any certificate seen by any test did not hold up.
class AuditEnvironment : public testing::Environment {
 public:
  void TearDown() override {
    const auto& tally = sze::audit::tally();
    std::printf("certificate audit: %zu checked, %zu violations\n", tally.checked.load(),
                tally.violations.load());
    EXPECT_EQ(tally.violations.load(), 0u);
  }
};

}  // namespace

int main(int argc, char** argv) {
  testing::InitGoogleTest(&argc, argv);
  testing::AddGlobalTestEnvironment(new AuditEnvironment);
  return RUN_ALL_TESTS();
}
