#include <gtest/gtest.h>

#include <random>

#include "sdnlab/error.hpp"
#include "sdnlab/net.hpp"
#include "support.hpp"

using namespace sdnlab;

TEST(Ipv4, ParseAndFormat) {
  EXPECT_EQ(Ipv4::parse("10.0.0.5").value, 0x0A000005u);
  EXPECT_EQ(Ipv4{0xF0010203u}.str(), "240.1.2.3");
  EXPECT_THROW(Ipv4::parse("10.0.0"), Error);
  EXPECT_THROW(Ipv4::parse("10.0.0.256"), Error);
  EXPECT_THROW(Ipv4::parse("a.b.c.d"), Error);
}

TEST(Ipv4Prefix, ContainsAndOverlaps) {
  auto p = Ipv4Prefix::parse("240.0.0.0/16");
  EXPECT_EQ(p.size(), 65536u);
  EXPECT_TRUE(p.contains(Ipv4::parse("240.0.255.255")));
  EXPECT_FALSE(p.contains(Ipv4::parse("240.1.0.0")));
  EXPECT_TRUE(p.overlaps(Ipv4Prefix::parse("240.0.0.0/8")));
  EXPECT_FALSE(p.overlaps(Ipv4Prefix::parse("241.0.0.0/8")));
  EXPECT_THROW(Ipv4Prefix::parse("10.0.0.1/24"), Error);
  EXPECT_EQ(Ipv4Prefix::parse("0.0.0.0/0").mask(), 0u);
}

TEST(Mac, RoundTrip) {
  EXPECT_EQ(format_mac(0x020000000001ull), "02:00:00:00:00:01");
  EXPECT_EQ(parse_mac("aa:bb:cc:dd:ee:ff"), 0xAABBCCDDEEFFull);
  EXPECT_THROW(parse_mac("aa:bb"), Error);
}

TEST(Double, ShortestRoundTrip) {
  EXPECT_EQ(format_double(346), "346");
  EXPECT_EQ(format_double(0.1), "0.1");
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double v = static_cast<double>(rng()) / 3.0e7;
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
}

TEST(HeaderTuple, TextRoundTrip) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    HeaderTuple h;
    h.in_port = static_cast<std::uint32_t>(testsupport::pick(rng, 0, 64));
    h.eth_src = static_cast<std::uint64_t>(testsupport::pick(rng, 0, (1ll << 48) - 1));
    h.eth_dst = static_cast<std::uint64_t>(testsupport::pick(rng, 0, (1ll << 48) - 1));
    h.ip_src.value = static_cast<std::uint32_t>(rng());
    h.ip_dst.value = static_cast<std::uint32_t>(rng());
    h.tp_src = static_cast<std::uint16_t>(rng());
    h.tp_dst = static_cast<std::uint16_t>(rng());
    h.tcp_options = static_cast<std::uint8_t>(testsupport::pick(rng, 0, 3));
    EXPECT_EQ(HeaderTuple::parse(h.str()), h);
  }
}

TEST(HeaderTuple, ValidateRejectsBadFields) {
  HeaderTuple h;
  h.eth_src = 1ull << 48;
  EXPECT_THROW(h.validate(), Error);
  HeaderTuple u;
  u.ip_proto = kIpProtoUdp;
  u.tcp_options = kMpCapable;
  EXPECT_THROW(u.validate(), Error);
}

TEST(TcpOptions, Format) {
  EXPECT_EQ(format_tcp_options(0), "-");
  EXPECT_EQ(format_tcp_options(kMpCapable | kMpJoin), "mp_capable+mp_join");
  EXPECT_EQ(parse_tcp_options("mp_join"), kMpJoin);
  EXPECT_THROW(parse_tcp_options("sack"), Error);
}
