// Copyright 2026 The VTLayout Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <set>

#include "vtlayout/common/error.hpp"
#include "vtlayout/common/hash.hpp"
#include "vtlayout/common/image.hpp"
#include "vtlayout/common/parallel.hpp"
#include "vtlayout/common/rng.hpp"

namespace vtlayout {
namespace {

TEST(Error, ExitCodesFollowTheThreeFamilies) {
  EXPECT_EQ(ExitCodeFor(ErrorKind::kConfiguration), 1);
  EXPECT_EQ(ExitCodeFor(ErrorKind::kCompatibility), 1);
  for (ErrorKind k : {ErrorKind::kFormat, ErrorKind::kSchema, ErrorKind::kIntegrity, ErrorKind::kLookup,
                      ErrorKind::kInput, ErrorKind::kData, ErrorKind::kDegenerate, ErrorKind::kShape}) {
    EXPECT_EQ(ExitCodeFor(k), 2) << ErrorKindName(k);
  }
  EXPECT_EQ(ExitCodeFor(ErrorKind::kDivergence), 3);
  EXPECT_EQ(ExitCodeFor(ErrorKind::kIo), 3);
}

TEST(Error, FailCarriesKindAndFormatErrorCarriesOffset) {
  try {
    Fail(ErrorKind::kLookup, "missing");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kLookup);
    EXPECT_NE(std::string(e.what()).find("missing"), std::string::npos);
  }
  FormatError fe("bad", 17);
  EXPECT_EQ(fe.kind(), ErrorKind::kFormat);
  EXPECT_EQ(fe.byte_offset(), 17);
}

TEST(Rng, SameSeedSameSequence) {
  Rng a(7), b(7), c(8);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.NextU64();
    EXPECT_EQ(x, b.NextU64());
    differs |= x != c.NextU64();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, UniformIntStaysInRangeAndHitsEveryValue) {
  Rng rng(3);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = rng.UniformInt(-3, 4);
    ASSERT_GE(v, -3);
    ASSERT_LE(v, 4);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 8u);
  EXPECT_EQ(rng.UniformInt(5, 5), 5);
}

TEST(Rng, UniformAndNormalMoments) {
  Rng rng(11);
  double sum = 0, sq = 0, nsum = 0, nsq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
    const double z = rng.Normal();
    nsum += z;
    nsq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.01);
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 0.005);
  EXPECT_NEAR(nsum / n, 0.0, 0.03);
  EXPECT_NEAR(nsq / n, 1.0, 0.05);
}

TEST(Rng, ShuffleIsAPermutation) {
  Rng rng(5);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  rng.Shuffle(std::span<int>(v));
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(Rng, MixSeedSeparatesStreams) {
  EXPECT_NE(MixSeed(1, 2), MixSeed(2, 1));
  EXPECT_EQ(MixSeed(1, 2), MixSeed(1, 2));
}

TEST(Hash, KnownFnvVectors) {
  // Published FNV-1a 64-bit test vectors.
  EXPECT_EQ(HashBytes(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(HashBytes("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(HashBytes("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(HexDigest(0x1ULL), "0000000000000001");
}

TEST(Hash, IncrementalEqualsOneShot) {
  Fnv1a h;
  h.Update(std::string_view("foo")).Update(std::string_view("bar"));
  EXPECT_EQ(h.digest(), HashBytes("foobar"));
}

TEST(Image, PngRoundTripIsLossless) {
  Image img(7, 5, 3);
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = static_cast<std::uint8_t>(i * 37 % 256);
  const auto bytes = EncodePng(img);
  EXPECT_EQ(DecodePng(bytes), img);
  EXPECT_EQ(EncodePng(img), bytes);
}

TEST(Image, FileIoDispatchesOnSignature) {
  const auto dir = std::filesystem::temp_directory_path() / "vtlayout_common_png";
  std::filesystem::create_directories(dir);
  Image img(4, 3, 3, 200);
  img.at(1, 1, 0) = 10;
  WritePng(dir / "x.png", img);
  EXPECT_EQ(ReadImageRgb(dir / "x.png"), img);
  std::filesystem::remove_all(dir);
}

TEST(Image, DecodingGarbageFails) {
  EXPECT_THROW(DecodePng({1, 2, 3, 4}), Error);
  EXPECT_THROW(ReadImageRgb("/nonexistent/file.png"), Error);
}

TEST(Parallel, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(500);
  ParallelFor(hits.size(), 4, [&](std::size_t i) { hits[i].fetch_add(1); });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(Parallel, RethrowsTheFirstFailure) {
  EXPECT_THROW(ParallelFor(100, 3,
                           [](std::size_t i) {
                             if (i == 42) Fail(ErrorKind::kData, "boom");
                           }),
               Error);
}

TEST(Parallel, ResolveWorkers) {
  EXPECT_EQ(ResolveWorkers(3), 3);
  EXPECT_GE(ResolveWorkers(0), 1);
}

}  // namespace
}  // namespace vtlayout
