#include <array>

#include "mrpods/ecc.hpp"

namespace mrpods::gf256 {
namespace {

constexpr unsigned kPrimitive = 0x11D;

struct Tables {
  std::array<std::uint8_t, 512> exp{};
  std::array<int, 256> log{};

  constexpr Tables() {
    unsigned x = 1;
    for (int i = 0; i < 255; ++i) {
      exp[i] = static_cast<std::uint8_t>(x);
      log[x] = i;
      x <<= 1;
      if (x & 0x100) x ^= kPrimitive;
    }
    for (int i = 255; i < 512; ++i) exp[i] = exp[i - 255];
    log[0] = -1;
  }
};

constexpr Tables kTables{};

}  // namespace

std::uint8_t exp(int power) {
  power %= 255;
  if (power < 0) power += 255;
  return kTables.exp[power];
}

int log(std::uint8_t value) { return kTables.log[value]; }

std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
  if (a == 0 || b == 0) return 0;
  return kTables.exp[kTables.log[a] + kTables.log[b]];
}

std::uint8_t div(std::uint8_t a, std::uint8_t b) {
  if (a == 0) return 0;
  return kTables.exp[kTables.log[a] + 255 - kTables.log[b]];
}

std::uint8_t inv(std::uint8_t a) { return kTables.exp[255 - kTables.log[a]]; }

std::uint8_t mul_slow(std::uint8_t a, std::uint8_t b) {
  unsigned acc = 0;
  unsigned aa = a;
  for (unsigned bb = b; bb != 0; bb >>= 1) {
    if (bb & 1) acc ^= aa;
    aa <<= 1;
    if (aa & 0x100) aa ^= kPrimitive;
  }
  return static_cast<std::uint8_t>(acc);
}

}  // namespace mrpods::gf256
