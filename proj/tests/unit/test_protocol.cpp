#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "kioskbot/error.hpp"
#include "kioskbot/protocol.hpp"

namespace kioskbot {
namespace {

std::string be32(std::uint32_t n) {
  return {static_cast<char>(n >> 24), static_cast<char>((n >> 16) & 0xFF), static_cast<char>((n >> 8) & 0xFF),
          static_cast<char>(n & 0xFF)};
}

TEST(Frame, LayoutIsBigEndianLengthThenBody) {
  const Json m{{"type", "select"}, {"element_id", "x"}};
  const std::string body = m.dump();
  EXPECT_EQ(encode_frame(m), be32(static_cast<std::uint32_t>(body.size())) + body);
}

TEST(Frame, RoundTripAcrossArbitrarySplits) {
  std::vector<Json> sent{msg::hello("bot"), msg::hello("phone", std::string("s-1")), msg::select("avocado_tea"),
                         msg::touch_cmd(12.5, 300.0), msg::touch_done(std::nullopt, false),
                         msg::touch_done(std::string("add"), true), msg::error(ReasonCode::OutOfReach, "far"),
                         Json{{"type", "ui"}, {"label", "Café ☕"}}};
  std::string stream;
  for (const auto& m : sent) stream += encode_frame(m);
  std::mt19937 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    FrameDecoder dec;
    std::vector<Json> got;
    std::size_t i = 0;
    while (i < stream.size()) {
      const std::size_t n = std::min<std::size_t>(stream.size() - i, 1 + rng() % 17);
      dec.feed(std::string_view(stream).substr(i, n));
      i += n;
      while (auto m = dec.next()) got.push_back(*m);
    }
    EXPECT_EQ(got, sent);
  }
}

TEST(Frame, PartialFramesWait) {
  FrameDecoder dec;
  const std::string f = encode_frame(msg::select("a"));
  dec.feed(f.substr(0, 3));
  EXPECT_FALSE(dec.next());
  dec.feed(f.substr(3, 4));
  EXPECT_FALSE(dec.next());
  dec.feed(f.substr(7));
  EXPECT_EQ(dec.next(), msg::select("a"));
  EXPECT_FALSE(dec.next());
}

TEST(Frame, OversizedAndNonObjectPayloads) {
  {
    FrameDecoder dec;
    dec.feed(be32(static_cast<std::uint32_t>(kMaxFrameBytes + 1)));
    EXPECT_THROW(dec.next(), Error);
  }
  for (std::string body : {"[1,2]", "\"hi\"", "42", "{not json", ""}) {
    FrameDecoder dec;
    dec.feed(be32(static_cast<std::uint32_t>(body.size())) + body);
    try {
      dec.next();
      ADD_FAILURE() << body;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Protocol);
    }
  }
  // a bad frame is consumed, so the stream can continue
  FrameDecoder dec;
  dec.feed(be32(2) + "[]" + encode_frame(msg::select("b")));
  EXPECT_THROW(dec.next(), Error);
  EXPECT_EQ(dec.next(), msg::select("b"));
}

TEST(ReasonCodes, ClosedEnumRoundTrip) {
  for (ReasonCode c : {ReasonCode::UnrecognizedScreen, ReasonCode::RelocationRequired, ReasonCode::OutOfReach,
                       ReasonCode::Internal}) {
    EXPECT_EQ(parse_reason_code(to_string(c)), c);
  }
  EXPECT_EQ(to_string(ReasonCode::UnrecognizedScreen), "UNRECOGNIZED_SCREEN");
  EXPECT_EQ(to_string(ReasonCode::RelocationRequired), "RELOCATION_REQUIRED");
  EXPECT_EQ(to_string(ReasonCode::OutOfReach), "OUT_OF_REACH");
  EXPECT_EQ(to_string(ReasonCode::Internal), "INTERNAL");
  EXPECT_FALSE(parse_reason_code("internal"));
  EXPECT_FALSE(parse_reason_code(""));
}

TEST(Messages, Shapes) {
  EXPECT_EQ(msg::hello("bot"), (Json{{"type", "hello"}, {"role", "bot"}}));
  EXPECT_EQ(msg::error(ReasonCode::Internal, "x"), (Json{{"type", "error"}, {"code", "INTERNAL"}, {"detail", "x"}}));
  EXPECT_EQ(msg::touch_cmd(1.0, 2.0), (Json{{"type", "touch_cmd"}, {"theta_deg", 1.0}, {"r_mm", 2.0}}));
  EXPECT_TRUE(msg::touch_done(std::nullopt, false)["hit"].is_null());
}

TEST(Mailbox, FifoTimeoutAndClose) {
  Mailbox box;
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_FALSE(box.pop(std::chrono::milliseconds(30)));
  EXPECT_GE(std::chrono::steady_clock::now() - t0, std::chrono::milliseconds(25));
  for (int i = 0; i < 5; ++i) box.push(Json{{"i", i}});
  for (int i = 0; i < 5; ++i) EXPECT_EQ((*box.pop(std::chrono::milliseconds(0)))["i"], i);
  box.push(Json{{"i", 9}});
  box.close();
  EXPECT_TRUE(box.closed());
  box.push(Json{{"i", 10}});  // dropped
  EXPECT_EQ((*box.pop(std::chrono::milliseconds(0)))["i"], 9);
  EXPECT_FALSE(box.pop(std::chrono::seconds(5)));  // closed and drained: returns at once
}

TEST(Mailbox, ProducerConsumerKeepsOrder) {
  Mailbox box;
  constexpr int kN = 2000;
  std::thread producer([&] {
    for (int i = 0; i < kN; ++i) box.push(Json(i));
  });
  for (int i = 0; i < kN; ++i) {
    auto m = box.pop(std::chrono::seconds(5));
    ASSERT_TRUE(m);
    ASSERT_EQ(*m, i);
  }
  producer.join();
}

}  // namespace
}  // namespace kioskbot
