/*
 * Copyright 2026 The CryptGraph Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cryptgraph/outsourcing/session.hpp"

#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "cryptgraph/encoding/encoding.hpp"
#include "test_util.hpp"

namespace cryptgraph {
namespace {

using ::cryptgraph::testing::FragileLatticeParams;
using ::cryptgraph::testing::ParamsFor;

// ---------------------------------------------------------------------------
// Framing.

TEST(FrameTest, GoldenBytes) {
  const std::vector<std::uint8_t> want = {0, 0, 0, 2, '{', '}'};
  EXPECT_EQ(EncodeFrame("{}"), want);
  const std::vector<std::uint8_t> empty = {0, 0, 0, 0};
  EXPECT_EQ(EncodeFrame(""), empty);
  const auto big = EncodeFrame(std::string(0x010203, 'x'));
  EXPECT_EQ(big[0], 0);
  EXPECT_EQ(big[1], 1);
  EXPECT_EQ(big[2], 2);
  EXPECT_EQ(big[3], 3);
}

TEST(FrameTest, RoundTripOverPipe) {
  auto [a, b] = MakePipe();
  WriteFrame(*a, "hello");
  WriteFrame(*a, "");
  WriteFrame(*a, "world");
  a->Close();
  EXPECT_EQ(ReadFrame(*b), "hello");
  EXPECT_EQ(ReadFrame(*b), "");
  EXPECT_EQ(ReadFrame(*b), "world");
  EXPECT_EQ(ReadFrame(*b), std::nullopt);
}

TEST(FrameTest, OversizedOutgoingFrameIsRejected) {
  EXPECT_THROW(EncodeFrame(std::string(11, 'x'), 10), FrameError);
  EXPECT_NO_THROW(EncodeFrame(std::string(10, 'x'), 10));
}

TEST(FrameTest, OversizedIncomingFrameClosesStream) {
  auto [a, b] = MakePipe();
  const std::uint8_t hdr[4] = {0, 0, 0, 100};
  a->WriteAll(hdr);
  EXPECT_THROW(ReadFrame(*b, 10), FrameError);
  // b closed itself, so the writer now fails.
  EXPECT_THROW(WriteFrame(*a, "x"), TransportError);
}

TEST(FrameTest, TruncatedFrameIsTransportError) {
  auto [a, b] = MakePipe();
  const std::uint8_t partial[6] = {0, 0, 0, 9, 'a', 'b'};
  a->WriteAll(partial);
  a->Close();
  EXPECT_THROW(ReadFrame(*b), TransportError);
}

TEST(FrameTest, HostPortParsing) {
  const HostPort hp = ParseHostPort("127.0.0.1:7000");
  EXPECT_EQ(hp.host, "127.0.0.1");
  EXPECT_EQ(hp.port, 7000);
  EXPECT_THROW(ParseHostPort("localhost"), ParameterError);
  EXPECT_THROW(ParseHostPort("h:70000"), ParameterError);
  EXPECT_THROW(ParseHostPort("h:x"), ParameterError);
  EXPECT_THROW(ParseHostPort(":1"), ParameterError);
}

// ---------------------------------------------------------------------------
// Message schema.

class MessageTest : public ::testing::Test {
 protected:
  void SetUp() override {
    keys_ = Keygen(ParamsFor(BackendKind::kTransparent), SeedFromInteger(1));
    enc_.emplace(keys_.public_key, SeedFromInteger(2));
  }
  const HeContext& ctx() const { return *keys_.public_key.context; }

  OutsourceRequest SampleRequest() {
    OutsourceRequest req;
    req.id = 7;
    req.kind = RequestKind::kRescaleBatch;
    req.target_scale = 1000;
    req.report_convergence = true;
    req.epsilon = 0.25;
    req.items = {{enc_->Encrypt(5, 2), 2}, {enc_->Encrypt(-3, 2), 2}};
    req.previous = std::vector<WireItem>{{enc_->Encrypt(1, 1), 1}, {enc_->Encrypt(0, 1), 1}};
    return req;
  }

  KeyPair keys_;
  std::optional<Encryptor> enc_;
};

std::set<std::string> Keys(const Json& j) {
  std::set<std::string> out;
  for (auto it = j.begin(); it != j.end(); ++it) out.insert(it.key());
  return out;
}

TEST_F(MessageTest, RequestCarriesOnlyAllowedFields) {
  const Json j = RequestToJson(SampleRequest(), ctx());
  const std::set<std::string> allowed = {"epsilon",     "id",           "items",
                                         "kind",        "previous",     "report_convergence",
                                         "target_scale"};
  EXPECT_EQ(Keys(j), allowed);
  for (const Json& it : j["items"]) {
    EXPECT_EQ(Keys(it), (std::set<std::string>{"ct", "scale"}));
    EXPECT_TRUE(it["ct"].is_string());
  }
  EXPECT_EQ(j["kind"], "rescale_batch");
  EXPECT_EQ(j["target_scale"], "1000");
  EXPECT_EQ(j["epsilon"], "0.25");
}

TEST_F(MessageTest, MinimalRequestOmitsOptionalFields) {
  OutsourceRequest req;
  req.id = 1;
  req.target_scale = 10;
  req.items = {{enc_->Encrypt(4), 1}};
  const Json j = RequestToJson(req, ctx());
  EXPECT_EQ(Keys(j), (std::set<std::string>{"id", "items", "kind", "target_scale"}));
  EXPECT_EQ(j["kind"], "reciprocal_batch");
}

TEST_F(MessageTest, SerializationIsDeterministicWithSortedKeys) {
  const OutsourceRequest req = SampleRequest();
  const std::string a = RequestToJson(req, ctx()).dump();
  const std::string b = RequestToJson(req, ctx()).dump();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rfind("{\"epsilon\":", 0), 0u);
}

TEST_F(MessageTest, RequestRoundTrip) {
  const OutsourceRequest req = SampleRequest();
  const OutsourceRequest back = RequestFromJson(RequestToJson(req, ctx()), ctx());
  EXPECT_EQ(back.id, 7u);
  EXPECT_EQ(back.kind, RequestKind::kRescaleBatch);
  EXPECT_EQ(back.target_scale, 1000);
  EXPECT_TRUE(back.report_convergence);
  EXPECT_EQ(back.epsilon, 0.25);
  ASSERT_EQ(back.items.size(), 2u);
  EXPECT_EQ(back.items[1].scale, 2);
  EXPECT_EQ(SerializeCiphertext(back.items[1].ct, ctx()),
            SerializeCiphertext(req.items[1].ct, ctx()));
  ASSERT_TRUE(back.previous.has_value());
  EXPECT_EQ(back.previous->size(), 2u);
}

TEST_F(MessageTest, ResponseRoundTrip) {
  OutsourceResponse resp;
  resp.id = 3;
  resp.items = {{enc_->Encrypt(0, 9), 9}, {enc_->Encrypt(1, 9), 9}};
  resp.converged = false;
  resp.errors = {{0, ItemErrorCode::kZeroDivisor}, {1, ItemErrorCode::kCorrupt}};
  const Json j = ResponseToJson(resp, ctx());
  EXPECT_EQ(Keys(j), (std::set<std::string>{"converged", "errors", "id", "items"}));
  EXPECT_EQ(j["errors"][0]["code"], "zero_divisor");
  const OutsourceResponse back = ResponseFromJson(j, ctx());
  EXPECT_EQ(back.id, 3u);
  EXPECT_EQ(back.converged, std::optional<bool>(false));
  EXPECT_EQ(back.errors, resp.errors);
}

TEST_F(MessageTest, SchemaViolationsAreProtocolErrors) {
  const Json good = RequestToJson(SampleRequest(), ctx());
  auto broken = [&](auto mutate) {
    Json j = good;
    mutate(j);
    return j;
  };
  EXPECT_THROW(RequestFromJson(Json::array(), ctx()), ProtocolError);
  EXPECT_THROW(RequestFromJson(broken([](Json& j) { j["kind"] = "pagerank"; }), ctx()),
               ProtocolError);
  EXPECT_THROW(RequestFromJson(broken([](Json& j) { j.erase("items"); }), ctx()),
               ProtocolError);
  EXPECT_THROW(RequestFromJson(broken([](Json& j) { j["items"] = Json::array(); }), ctx()),
               ProtocolError);
  EXPECT_THROW(RequestFromJson(broken([](Json& j) { j["id"] = -1; }), ctx()), ProtocolError);
  EXPECT_THROW(RequestFromJson(broken([](Json& j) { j["target_scale"] = 5; }), ctx()),
               ProtocolError);
  EXPECT_THROW(RequestFromJson(broken([](Json& j) { j["target_scale"] = "0"; }), ctx()),
               ProtocolError);
  EXPECT_THROW(RequestFromJson(broken([](Json& j) { j["items"][0]["scale"] = "3"; }), ctx()),
               ProtocolError);
  EXPECT_THROW(RequestFromJson(broken([](Json& j) { j["items"][0]["ct"] = "!!"; }), ctx()),
               ProtocolError);
  EXPECT_THROW(RequestFromJson(broken([](Json& j) { j["previous"].erase(0); }), ctx()),
               ProtocolError);
  EXPECT_THROW(RequestFromJson(broken([](Json& j) { j["epsilon"] = "abc"; }), ctx()),
               ProtocolError);
}

TEST_F(MessageTest, ForeignCiphertextIsRejected) {
  const KeyPair other = Keygen(ParamsFor(BackendKind::kLattice), SeedFromInteger(3));
  const Json j = RequestToJson(SampleRequest(), ctx());
  EXPECT_ANY_THROW(RequestFromJson(j, *other.public_key.context));
}

// ---------------------------------------------------------------------------
// End-to-end over a live client.

using SessionParam = std::tuple<BackendKind, TransportKind>;

class OutsourcingTest : public ::testing::TestWithParam<SessionParam> {
 protected:
  void SetUp() override {
    keys_ = Keygen(ParamsFor(backend()), SeedFromInteger(20));
    handler_.emplace(keys_.secret_key, keys_.public_key, SeedFromInteger(21));
    enc_.emplace(keys_.public_key, SeedFromInteger(22));
    dec_.emplace(keys_.secret_key);
    eval_.emplace(keys_.public_key.context);
    session_.emplace(*handler_, transport());
  }
  void TearDown() override {
    if (session_) session_->Finish();
  }

  BackendKind backend() const { return std::get<0>(GetParam()); }
  TransportKind transport() const { return std::get<1>(GetParam()); }
  Channel& channel() { return session_->channel(); }
  double Value(const Ciphertext& c) const { return Decode(dec_->Decrypt(c), c.scale()); }

  KeyPair keys_;
  std::optional<ClientHandler> handler_;
  std::optional<Encryptor> enc_;
  std::optional<Decryptor> dec_;
  std::optional<Evaluator> eval_;
  std::optional<ClientSession> session_;
};

TEST_P(OutsourcingTest, ReciprocalOfFour) {
  const std::vector<Ciphertext> in = {enc_->Encrypt(4)};
  const ReciprocalResult r = RequestReciprocals(channel(), in, 1000000);
  ASSERT_EQ(r.values.size(), 1u);
  EXPECT_TRUE(r.errors.empty());
  EXPECT_EQ(r.values[0].scale(), 1000000);
  EXPECT_EQ(dec_->Decrypt(r.values[0]), 250000);
  EXPECT_DOUBLE_EQ(Value(r.values[0]), 0.25);
}

TEST_P(OutsourcingTest, ReciprocalBatchWithScalesSignsAndZero) {
  // 0.5 at scale 1000, -4 at scale 1, 0, and 3 at scale 2 (= 1.5).
  const std::vector<Ciphertext> in = {enc_->Encrypt(500, 1000), enc_->Encrypt(-4),
                                      enc_->Encrypt(0), enc_->Encrypt(3, 2)};
  const ReciprocalResult r = RequestReciprocals(channel(), in, 1000000);
  ASSERT_EQ(r.values.size(), 4u);
  EXPECT_EQ(dec_->Decrypt(r.values[0]), 2000000);
  EXPECT_EQ(dec_->Decrypt(r.values[1]), -250000);
  EXPECT_EQ(dec_->Decrypt(r.values[2]), 0);
  EXPECT_EQ(dec_->Decrypt(r.values[3]), 666667);  // 1/1.5, rounded
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0], (ItemError{2, ItemErrorCode::kZeroDivisor}));
  for (const auto& c : r.values) EXPECT_EQ(c.scale(), 1000000);
}

TEST_P(OutsourcingTest, RescaleNegativeHalf) {
  // -0.5 held at scale 2000, brought down to scale 100.
  const std::vector<Ciphertext> in = {enc_->Encrypt(-1000, 2000)};
  const RescaleResult r = RequestRescale(channel(), in, 100, false);
  ASSERT_EQ(r.values.size(), 1u);
  EXPECT_EQ(r.values[0].scale(), 100);
  EXPECT_EQ(dec_->Decrypt(r.values[0]), -50);
  EXPECT_FALSE(r.converged.has_value());
}

TEST_P(OutsourcingTest, RescaleRoundsHalfAwayFromZero) {
  // 1/8 and -1/8 at scale 8 down to scale 4: 0.5 and -0.5 in target units.
  const std::vector<Ciphertext> in = {enc_->Encrypt(1, 8), enc_->Encrypt(-1, 8),
                                      enc_->Encrypt(3, 8)};
  const RescaleResult r = RequestRescale(channel(), in, 4, false);
  EXPECT_EQ(dec_->Decrypt(r.values[0]), 1);
  EXPECT_EQ(dec_->Decrypt(r.values[1]), -1);
  EXPECT_EQ(dec_->Decrypt(r.values[2]), 2);  // 1.5 -> 2
}

TEST_P(OutsourcingTest, RescaleRefreshesDegreeAndNoise) {
  Ciphertext c = enc_->Encrypt(3);
  c = eval_->Mul(c, c);
  c = eval_->Mul(c, c);  // 81, degree 5
  ASSERT_EQ(c.degree(), 5);
  const std::vector<Ciphertext> in = {c};
  const RescaleResult r = RequestRescale(channel(), in, 1, false);
  EXPECT_EQ(dec_->Decrypt(r.values[0]), 81);
  EXPECT_EQ(r.values[0].degree(), 2);
  if (backend() == BackendKind::kLattice) {
    const Ciphertext fresh = enc_->Encrypt(81);
    EXPECT_GT(dec_->NoiseBudget(r.values[0]), dec_->NoiseBudget(c));
    EXPECT_NEAR(dec_->NoiseBudget(r.values[0]), dec_->NoiseBudget(fresh), 3);
  }
  // A refreshed ciphertext supports a full multiplication chain again.
  EXPECT_NO_THROW(eval_->Mul(eval_->Mul(r.values[0], r.values[0]), r.values[0]));
}

TEST_P(OutsourcingTest, ConvergenceFlag) {
  const BigInt s = 1000;
  const std::vector<Ciphertext> prev = {enc_->Encrypt(500, s), enc_->Encrypt(250, s)};
  const std::vector<Ciphertext> same = {enc_->Encrypt(500, s), enc_->Encrypt(250, s)};
  const std::vector<Ciphertext> moved = {enc_->Encrypt(500, s), enc_->Encrypt(252, s)};

  RescaleResult r = RequestRescale(channel(), same, s, true, prev, 1e-6);
  EXPECT_EQ(r.converged, std::optional<bool>(true));
  r = RequestRescale(channel(), moved, s, true, prev, 1e-6);
  EXPECT_EQ(r.converged, std::optional<bool>(false));
  // |0.252 - 0.250| = 0.002 < 0.01.
  r = RequestRescale(channel(), moved, s, true, prev, 0.01);
  EXPECT_EQ(r.converged, std::optional<bool>(true));
  // No previous values: nothing to compare, so not converged.
  r = RequestRescale(channel(), same, s, true, {}, 1e-6);
  EXPECT_EQ(r.converged, std::optional<bool>(false));
  EXPECT_THROW(RequestRescale(channel(), same, s, true,
                              std::span<const Ciphertext>(prev.data(), 1), 1e-6),
               ValidationError);
}

TEST_P(OutsourcingTest, CountsMatchOnBothSides) {
  const std::vector<Ciphertext> three = {enc_->Encrypt(1), enc_->Encrypt(2), enc_->Encrypt(3)};
  RequestReciprocals(channel(), three, 100);
  RequestRescale(channel(), three, 2, false);
  RequestRescale(channel(), std::span<const Ciphertext>(three.data(), 2), 2, false);
  RequestReciprocals(channel(), std::vector<Ciphertext>{}, 100);  // no round trip
  session_->Finish();
  const ChannelCounts& cc = channel().counts();
  EXPECT_EQ(cc.reciprocal_batches, 1u);
  EXPECT_EQ(cc.rescale_batches, 2u);
  EXPECT_EQ(cc.reciprocal_items, 3u);
  EXPECT_EQ(cc.rescale_items, 5u);
  EXPECT_EQ(handler_->counts().requests, 3u);
  EXPECT_EQ(handler_->counts().reciprocals, 3u);
  EXPECT_EQ(handler_->counts().rescales, 5u);
}

TEST_P(OutsourcingTest, ReplayGivesSameValues) {
  const std::vector<Ciphertext> in = {enc_->Encrypt(7), enc_->Encrypt(-2)};
  const ReciprocalResult a = RequestReciprocals(channel(), in, 10000);
  const ReciprocalResult b = RequestReciprocals(channel(), in, 10000);
  for (std::size_t k = 0; k < in.size(); ++k) {
    EXPECT_EQ(dec_->Decrypt(a.values[k]), dec_->Decrypt(b.values[k]));
  }
  EXPECT_EQ(dec_->Decrypt(a.values[0]), 1429);
  EXPECT_EQ(dec_->Decrypt(a.values[1]), -5000);
}

TEST_P(OutsourcingTest, ResultOverflowingPlaintextSpaceFailsSession) {
  // 1 / (1 / 10^12) at a huge target cannot fit in t.
  const std::vector<Ciphertext> in = {enc_->Encrypt(1, BigInt("1000000000000"))};
  EXPECT_THROW(RequestReciprocals(channel(), in, BigInt("1000000000000")), TransportError);
  EXPECT_THROW(session_->Finish(), EncodingError);
}

std::string SessionName(const ::testing::TestParamInfo<SessionParam>& info) {
  return std::string(BackendName(std::get<0>(info.param))) +
         (std::get<1>(info.param) == TransportKind::kTcp ? "Tcp" : "InProcess");
}

INSTANTIATE_TEST_SUITE_P(
    Sessions, OutsourcingTest,
    ::testing::Combine(::testing::Values(BackendKind::kTransparent, BackendKind::kLattice),
                       ::testing::Values(TransportKind::kInProcess, TransportKind::kTcp)),
    SessionName);

// ---------------------------------------------------------------------------
// Transport independence and error items.

std::vector<Bytes> RunFixedSession(TransportKind transport) {
  const KeyPair keys = Keygen(ParamsFor(BackendKind::kLattice), SeedFromInteger(30));
  ClientHandler handler(keys.secret_key, keys.public_key, SeedFromInteger(31));
  Encryptor enc(keys.public_key, SeedFromInteger(32));
  ClientSession session(handler, transport);
  const std::vector<Ciphertext> in = {enc.Encrypt(3), enc.Encrypt(0), enc.Encrypt(-9, 4)};
  const ReciprocalResult r = RequestReciprocals(session.channel(), in, 1000);
  const RescaleResult s = RequestRescale(session.channel(), r.values, 10, false);
  session.Finish();
  std::vector<Bytes> out;
  for (const auto& c : s.values) out.push_back(SerializeCiphertext(c, *keys.public_key.context));
  return out;
}

TEST(TransportTest, InProcessAndTcpProduceIdenticalBytes) {
  EXPECT_EQ(RunFixedSession(TransportKind::kInProcess), RunFixedSession(TransportKind::kTcp));
}

TEST(TransportTest, CorruptItemIsReportedAndReplacedWithZero) {
  const KeyPair keys = Keygen(FragileLatticeParams(), SeedFromInteger(40));
  ClientHandler handler(keys.secret_key, keys.public_key, SeedFromInteger(41));
  Encryptor enc(keys.public_key, SeedFromInteger(42));
  Decryptor dec(keys.secret_key);
  Evaluator eval(keys.public_key.context);
  Ciphertext bad = enc.Encrypt(3);
  while (dec.NoiseBudget(bad) > 0) bad = eval.Mul(bad, bad);

  ClientSession session(handler, TransportKind::kInProcess);
  const std::vector<Ciphertext> in = {enc.Encrypt(2), bad};
  const ReciprocalResult r = RequestReciprocals(session.channel(), in, 100);
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0], (ItemError{1, ItemErrorCode::kCorrupt}));
  EXPECT_EQ(dec.Decrypt(r.values[0]), 50);
  EXPECT_EQ(dec.Decrypt(r.values[1]), 0);
}

TEST(TransportTest, MismatchedKeysRejected) {
  const KeyPair a = Keygen(ParamsFor(BackendKind::kLattice), SeedFromInteger(50));
  HeParams other = ParamsFor(BackendKind::kLattice);
  other.plaintext_modulus = 4294967311ULL;
  const KeyPair b = Keygen(other, SeedFromInteger(51));
  EXPECT_THROW(ClientHandler(a.secret_key, b.public_key, SeedFromInteger(1)), FingerprintError);
}

TEST(TransportTest, GarbageFromCloudEndsClientSession) {
  const KeyPair keys = Keygen(ParamsFor(BackendKind::kTransparent), SeedFromInteger(60));
  ClientHandler handler(keys.secret_key, keys.public_key, SeedFromInteger(61));
  auto [cloud, client] = MakePipe();
  WriteFrame(*cloud, "not json");
  EXPECT_THROW(Serve(*client, handler), ProtocolError);
}

TEST(TransportTest, TcpConnectFailureIsTransportError) {
  // Grab an ephemeral port, then close it so nothing listens there.
  std::uint16_t port = 0;
  {
    TcpListener l(HostPort{"127.0.0.1", 0});
    port = l.port();
  }
  EXPECT_THROW(TcpConnect(HostPort{"127.0.0.1", port}), TransportError);
}

}  // namespace
}  // namespace cryptgraph
