// Copyright 2026 The mldp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "mldp/csv_io.h"

#include <memory>
#include <sstream>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "mldp/channel.h"
#include "mldp/metric_space.h"
#include "testing/status_matchers.h"

namespace mldp {
namespace {

using ::mldp::testing::StatusIs;
using ::testing::ElementsAre;

std::shared_ptr<const MetricSpace> Grid() {
  GridSpec spec;
  spec.rows = 3;
  spec.cols = 4;
  spec.width_m = 600;
  spec.height_m = 450;
  return std::make_shared<const MetricSpace>(*BuildGrid(spec));
}

TEST(ChannelCsvTest, RoundTripIsExact) {
  const auto space = Grid();
  ASSERT_OK_AND_ASSIGN(const Channel c, BuildGeometric(space, 0.0123));
  const std::string text = FormatChannelCsv(c);
  EXPECT_EQ(text.substr(0, 2), "# ");
  std::istringstream in(text);
  ASSERT_OK_AND_ASSIGN(const Channel back, ParseChannelCsv(in, space));
  EXPECT_TRUE(std::equal(c.matrix().begin(), c.matrix().end(),
                         back.matrix().begin()));
  EXPECT_EQ(back.mechanism(), Mechanism::kGeometric);
  EXPECT_EQ(back.epsilon(), 0.0123);
}

TEST(ChannelCsvTest, OneRowPerLine) {
  const auto space = Grid();
  const std::string text = FormatChannelCsv(Channel::Identity(space));
  size_t data_lines = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') ++data_lines;
  }
  EXPECT_EQ(data_lines, 12u);
}

TEST(ChannelCsvTest, RejectsWrongShapes) {
  const auto space = Grid();
  std::istringstream short_rows("1,0\n0,1\n");
  EXPECT_THAT(ParseChannelCsv(short_rows, space),
              StatusIs(absl::StatusCode::kInvalidArgument));
  std::istringstream junk("a,b\n");
  EXPECT_THAT(ParseChannelCsv(junk, space),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(HistogramCsvTest, RoundTrip) {
  const Histogram h(std::vector<uint64_t>{0, 3, 0, 9});
  std::istringstream in(FormatHistogramCsv(h));
  ASSERT_OK_AND_ASSIGN(const Histogram back, ParseHistogramCsv(in, 4));
  EXPECT_EQ(back, h);
}

TEST(HistogramCsvTest, RejectsCellsOutsideTheSpace) {
  std::istringstream in("cell,count\n5,1\n");
  EXPECT_THAT(ParseHistogramCsv(in, 4), StatusIs(absl::StatusCode::kOutOfRange));
}

TEST(CellListTest, RoundTripSkipsComments) {
  const std::vector<PointId> cells = {4, 0, 4, 899};
  std::istringstream in("# provenance\n" + FormatCellList(cells));
  ASSERT_OK_AND_ASSIGN(const std::vector<PointId> back, ParseCellList(in));
  EXPECT_THAT(back, ElementsAre(4, 0, 4, 899));
}

}  // namespace
}  // namespace mldp
