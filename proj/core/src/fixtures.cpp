#include "kioskbot/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <functional>
#include <numbers>
#include <random>

#include "kioskbot/error.hpp"

namespace kioskbot::fixtures {

namespace {

constexpr double kPxPerMm = 1.0 / kMmPerPixel;

class Canvas {
 public:
  Canvas(int w, int h, float fill) : img_{w, h, std::vector<float>(static_cast<std::size_t>(w) * h, fill)} {}

  int width() const { return img_.width; }
  int height() const { return img_.height; }
  FloatImage& image() { return img_; }

  void set(int x, int y, float v) {
    if (x >= 0 && y >= 0 && x < img_.width && y < img_.height) img_.data[static_cast<std::size_t>(y) * img_.width + x] = v;
  }

  // All geometry below is in millimeters.
  void fill_rect(const BBox& b, float v) {
    const int x0 = px(b.x), x1 = px(b.x + b.w), y0 = px(b.y), y1 = px(b.y + b.h);
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) set(x, y, v);
  }

  void stroke_rect(const BBox& b, double width_mm, float v) {
    fill_rect({b.x, b.y, b.w, width_mm}, v);
    fill_rect({b.x, b.y + b.h - width_mm, b.w, width_mm}, v);
    fill_rect({b.x, b.y, width_mm, b.h}, v);
    fill_rect({b.x + b.w - width_mm, b.y, width_mm, b.h}, v);
  }

  void fill_circle(Point2 c, double r, float v) {
    const int x0 = px(c.x - r), x1 = px(c.x + r) + 1, y0 = px(c.y - r), y1 = px(c.y + r) + 1;
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) {
        const double mx = (x + 0.5) * kMmPerPixel - c.x, my = (y + 0.5) * kMmPerPixel - c.y;
        if (mx * mx + my * my <= r * r) set(x, y, v);
      }
  }

  void fill_polygon(const std::vector<Point2>& poly, float v) {
    double ymin = 1e9, ymax = -1e9;
    for (auto p : poly) {
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    for (int y = px(ymin); y <= px(ymax); ++y) {
      const double my = (y + 0.5) * kMmPerPixel;
      std::vector<double> xs;
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2 a = poly[i], b = poly[(i + 1) % poly.size()];
        if ((a.y <= my && b.y > my) || (b.y <= my && a.y > my)) xs.push_back(a.x + (my - a.y) / (b.y - a.y) * (b.x - a.x));
      }
      std::sort(xs.begin(), xs.end());
      for (std::size_t i = 0; i + 1 < xs.size(); i += 2)
        for (int x = px(xs[i]); x < px(xs[i + 1]); ++x) set(x, y, v);
    }
  }

  void line(Point2 a, Point2 b, double width_mm, float v) {
    const double len = distance(a, b);
    const int steps = std::max(1, static_cast<int>(len * kPxPerMm * 2));
    for (int i = 0; i <= steps; ++i) {
      const double t = static_cast<double>(i) / steps;
      fill_circle(a + t * (b - a), 0.5 * width_mm, v);
    }
  }

  // 5x7 pseudo-glyphs derived from the character code; `cell` is the glyph
  // pixel size in mm. Returns the advance width.
  double text(const std::string& s, Point2 origin, double cell, float v) {
    double x = origin.x;
    for (unsigned char ch : s) {
      if (ch != ' ') {
        const std::uint64_t bits = glyph_bits(ch);
        for (int gy = 0; gy < 7; ++gy)
          for (int gx = 0; gx < 5; ++gx)
            if ((bits >> (gy * 5 + gx)) & 1u) fill_rect({x + gx * cell, origin.y + gy * cell, cell, cell}, v);
      }
      x += 6 * cell;
    }
    return x - origin.x;
  }

 private:
  static int px(double mm) { return static_cast<int>(std::floor(mm * kPxPerMm + 0.5)); }

  static std::uint64_t glyph_bits(unsigned char ch) {
    std::mt19937_64 g(0xC0FFEEull * (ch + 1));
    std::uint64_t bits = 0;
    while (std::popcount(bits) < 13) bits = g() & ((std::uint64_t{1} << 35) - 1);
    return bits;
  }

  FloatImage img_;
};

struct Style {
  std::uint64_t seed;
  float background;
  double decor_cell_mm;
  bool map_roads = false;
};

// Smooth low-contrast background plus a dense jittered grid of icons, text
// snippets and blob textures so every part of the screen carries features.
void draw_decor(Canvas& c, const Style& style, double w_mm, double h_mm) {
  std::mt19937_64 rng(style.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto gray = [&](double lo, double hi) { return static_cast<float>(lo + (hi - lo) * u(rng)); };

  // Soft gradient.
  const double gx = u(rng) * 40 - 20, gy = u(rng) * 40 - 20;
  auto& img = c.image();
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      img.data[static_cast<std::size_t>(y) * img.width + x] =
          static_cast<float>(style.background + gx * x / img.width + gy * y / img.height);

  if (style.map_roads) {
    for (double y = 20; y < h_mm; y += 35 + 20 * u(rng)) c.line({0, y}, {w_mm, y + 30 * (u(rng) - 0.5)}, 6, gray(225, 250));
    for (double x = 20; x < w_mm; x += 40 + 25 * u(rng)) c.line({x, 0}, {x + 40 * (u(rng) - 0.5), h_mm}, 6, gray(225, 250));
  }

  const double cell = style.decor_cell_mm;
  for (double cy = 0; cy < h_mm; cy += cell) {
    for (double cx = 0; cx < w_mm; cx += cell) {
      const Point2 o{cx + cell * 0.15 * u(rng), cy + cell * 0.15 * u(rng)};
      const double s = cell * (0.55 + 0.3 * u(rng));
      const int kind = static_cast<int>(u(rng) * 6);
      const float fg = u(rng) < 0.5 ? gray(10, 80) : gray(170, 250);
      switch (kind) {
        case 0: {  // tile with inner disc
          c.fill_rect({o.x, o.y, s, s * 0.8}, gray(60, 200));
          c.fill_circle({o.x + s * (0.3 + 0.4 * u(rng)), o.y + s * 0.4}, s * (0.12 + 0.15 * u(rng)), fg);
          break;
        }
        case 1: {  // random polygon icon
          std::vector<Point2> poly;
          const int n = 3 + static_cast<int>(u(rng) * 5);
          const double phase = u(rng) * 2 * std::numbers::pi;
          for (int i = 0; i < n; ++i) {
            const double a = phase + 2 * std::numbers::pi * i / n;
            const double r = s * (0.25 + 0.25 * u(rng));
            poly.push_back({o.x + s / 2 + r * std::cos(a), o.y + s / 2 + r * std::sin(a)});
          }
          c.fill_polygon(poly, fg);
          break;
        }
        case 2: {  // text snippet
          std::string word;
          const int len = 2 + static_cast<int>(u(rng) * 5);
          for (int i = 0; i < len; ++i) word.push_back(static_cast<char>('A' + static_cast<int>(u(rng) * 26)));
          const double cellmm = 0.5 * (2 + static_cast<int>(u(rng) * 2));
          c.text(word, o, cellmm, fg);
          c.text(word.substr(0, 1 + len / 2), {o.x, o.y + 9 * cellmm}, cellmm, fg);
          break;
        }
        case 3: {  // blob cluster
          for (int i = 0; i < 6; ++i) c.fill_circle({o.x + s * u(rng), o.y + s * u(rng)}, s * (0.05 + 0.12 * u(rng)), gray(0, 255));
          break;
        }
        case 4: {  // framed box with bars
          c.stroke_rect({o.x, o.y, s, s * 0.7}, 1.0, fg);
          for (int i = 0; i < 3; ++i) c.fill_rect({o.x + 2 + i * s * 0.3, o.y + s * 0.7 - 2 - s * 0.5 * u(rng), s * 0.18, s * 0.5 * u(rng) + 1}, gray(20, 230));
          break;
        }
        default: {  // checker patch
          const double q = s / 4;
          for (int yy = 0; yy < 3; ++yy)
            for (int xx = 0; xx < 3; ++xx)
              if (u(rng) < 0.5) c.fill_rect({o.x + xx * q, o.y + yy * q, q, q}, fg);
          break;
        }
      }
    }
  }
}

float label_color(float fill) { return fill > 128 ? 20.0f : 240.0f; }

void draw_elements(Canvas& c, const std::vector<Element>& elements, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& e : elements) {
    const BBox& b = e.bbox_mm;
    const double cell = std::clamp(b.h / 12.0, 0.5, 1.5);
    if (e.clickable) {
      const float fill = static_cast<float>(u(rng) < 0.5 ? 40 + 60 * u(rng) : 170 + 60 * u(rng));
      c.fill_rect(b, fill);
      c.stroke_rect(b, 1.0, label_color(fill) * 0.5f + 60.0f);
      const auto fit = static_cast<std::size_t>(std::max(0.0, (b.w - 4.0) / (6 * cell)));
      c.text(e.text.substr(0, fit), {b.x + 2.5, b.y + 0.5 * b.h - 3.5 * cell}, cell, label_color(fill));
    } else {
      c.text(e.text, {b.x + 1.0, b.y + 0.5 * b.h - 3.5 * cell}, cell, 15.0f);
    }
  }
}

struct ScreenSpec {
  std::string id;
  std::vector<Element> elements;
};

Element button(std::string id, std::string text, BBox b, std::optional<std::string> target = std::nullopt) {
  return {std::move(id), std::move(text), true, b, std::move(target)};
}
Element label(std::string id, std::string text, BBox b) { return {std::move(id), std::move(text), false, b, std::nullopt}; }

InterfaceRecord assemble(const std::string& id, double diagonal_in, const std::vector<ScreenSpec>& specs, Style style) {
  const auto [w_mm, h_mm] = screen_size_mm(diagonal_in);
  InterfaceRecord rec;
  rec.interface_id = id;
  rec.screen_width_mm = w_mm;
  rec.screen_height_mm = h_mm;
  rec.mm_per_pixel = kMmPerPixel;
  rec.home_screen_id = specs.front().id;
  const int wp = static_cast<int>(std::lround(w_mm / kMmPerPixel));
  const int hp = static_cast<int>(std::lround(h_mm / kMmPerPixel));
  std::mt19937_64 rng(style.seed ^ 0xABCDEFull);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    Canvas canvas(wp, hp, style.background);
    Style s = style;
    s.seed = style.seed * 131 + i;
    draw_decor(canvas, s, w_mm, h_mm);
    draw_elements(canvas, specs[i].elements, rng);
    Screen screen;
    screen.screen_id = specs[i].id;
    screen.image_path = id + "/" + specs[i].id + ".png";
    screen.image = to_gray(canvas.image());
    screen.elements = specs[i].elements;
    rec.screens.push_back(std::move(screen));
  }
  return rec;
}

// Row-major grid of equal buttons inside `area`.
std::vector<Element> button_grid(const std::string& prefix, const std::vector<std::string>& labels, BBox area, int cols,
                                 double bw, double bh, const std::optional<std::string>& target) {
  std::vector<Element> out;
  const int rows = static_cast<int>((labels.size() + cols - 1) / cols);
  const double gx = cols > 1 ? (area.w - cols * bw) / (cols - 1) : 0.0;
  const double gy = rows > 1 ? (area.h - rows * bh) / (rows - 1) : 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int r = static_cast<int>(i) / cols, col = static_cast<int>(i) % cols;
    out.push_back(button(prefix + std::to_string(i), labels[i], {area.x + col * (bw + gx), area.y + r * (bh + gy), bw, bh}, target));
  }
  return out;
}

InterfaceRecord locker() {
  ScreenSpec home{"welcome",
                  {label("title", "Parcel Locker", {60, 8, 140, 25}),
                   button("pick_up", "Pick Up", {60, 50, 60, 30}, "keypad"),
                   button("drop_off", "Drop Off", {145, 50, 60, 30}, "keypad"),
                   button("help", "Help", {100, 100, 60, 30}, "help")}};
  std::vector<std::string> digits{"1", "2", "3", "4", "5", "6", "7", "8", "9", "0"};
  ScreenSpec keypad{"keypad", button_grid("key_", digits, {60, 8, 150, 112}, 5, 25, 25, std::nullopt)};
  keypad.elements.push_back(button("cancel", "Cancel", {215, 100, 45, 30}, "welcome"));
  ScreenSpec help{"help", {label("help_text", "Call 555 0100", {40, 40, 150, 25}), button("back", "Back", {170, 100, 60, 30}, "welcome")}};
  return assemble(kLocker, 12, {home, keypad, help}, {101, 120, 16});
}

InterfaceRecord airport() {
  ScreenSpec home{"start",
                  {label("title", "Welcome to SFO", {150, 15, 200, 30}),
                   button("check_in", "Check In", {60, 80, 110, 40}, "flights"),
                   button("status", "Flight Status", {200, 80, 110, 40}, "flights"),
                   button("boarding", "Boarding Pass", {340, 80, 110, 40}, "flights"),
                   button("language", "Language", {200, 180, 110, 40})}};
  std::vector<std::string> flights{"UA 101 NRT", "UA 202 LHR", "AA 303 JFK", "DL 404 ATL", "AS 505 SEA", "WN 606 LAX"};
  ScreenSpec list{"flights", button_grid("flight_", flights, {60, 50, 340, 150}, 2, 150, 35, "start")};
  list.elements.push_back(button("back", "Back", {400, 215, 50, 30}, "start"));
  return assemble(kAirport, 21, {home, list}, {202, 150, 20});
}

InterfaceRecord restaurant() {
  std::vector<std::string> dishes{"Burger", "Salad", "Pasta", "Tacos", "Ramen", "Pizza", "Curry", "Sushi", "Steak", "Soup", "Wrap", "Pie"};
  ScreenSpec menu{"menu", button_grid("dish_", dishes, {60, 60, 480, 220}, 4, 90, 40, "detail")};
  menu.elements.insert(menu.elements.begin(), label("title", "Today Menu", {220, 15, 160, 30}));
  ScreenSpec detail{"detail",
                    {label("desc", "Chef Special", {100, 40, 200, 30}),
                     button("add_to_order", "Add to Order", {100, 200, 120, 40}, "menu"),
                     button("back", "Back", {400, 200, 80, 40}, "menu")}};
  return assemble(kRestaurant, 27, {menu, detail}, {303, 170, 22});
}

InterfaceRecord mall_map() {
  std::vector<std::string> stores;
  for (int i = 0; i < 20; ++i) stores.push_back("Store " + std::to_string(i + 1));
  ScreenSpec map{"map", button_grid("store_", stores, {70, 70, 740, 360}, 5, 70, 30, "store")};
  map.elements.insert(map.elements.begin(), label("title", "Mall Directory", {350, 15, 200, 30}));
  ScreenSpec store{"store",
                   {label("info", "Level 2 near Food Court", {200, 60, 300, 30}),
                    button("route", "Show Route", {200, 300, 120, 40}),
                    button("back", "Back", {600, 300, 100, 40}, "map")}};
  return assemble(kMallMap, 40, {map, store}, {404, 140, 24, true});
}

// Flat background with near-invisible, heavily softened elements: the labels
// exist in the database but the raster carries almost no corners.
InterfaceRecord monochrome() {
  const auto [w_mm, h_mm] = screen_size_mm(12);
  std::vector<ScreenSpec> specs{
      {"home", {label("title", "Welcome", {80, 20, 100, 25}), button("start", "Start", {95, 70, 70, 35}, "options")}},
      {"options",
       {button("option_a", "Option A", {40, 60, 70, 35}), button("option_b", "Option B", {150, 60, 70, 35}),
        button("back", "Back", {95, 105, 70, 35}, "home")}}};
  InterfaceRecord rec;
  rec.interface_id = kMonochrome;
  rec.screen_width_mm = w_mm;
  rec.screen_height_mm = h_mm;
  rec.mm_per_pixel = kMmPerPixel;
  rec.home_screen_id = "home";
  const int wp = static_cast<int>(std::lround(w_mm / kMmPerPixel));
  const int hp = static_cast<int>(std::lround(h_mm / kMmPerPixel));
  for (const auto& spec : specs) {
    Canvas canvas(wp, hp, 200.0f);
    for (const auto& e : spec.elements) {
      if (e.clickable) canvas.fill_rect(e.bbox_mm, 192.0f);
    }
    GrayImage img = to_gray(gaussian_blur(canvas.image(), 4.0));
    rec.screens.push_back({spec.id, std::string(kMonochrome) + "/" + spec.id + ".png", std::move(img), spec.elements});
  }
  return rec;
}

InterfaceRecord bubble_tea() {
  ScreenSpec menu{"menu",
                  {label("title", "Bubble Tea", {200, 12, 130, 28}),
                   button("avocado_tea", "Avocado Tea", {110, 60, 85, 32}, "customize"),
                   button("add_avocado", "Add", {200, 60, 40, 32}, "customize"),
                   label("price_avocado", "5.50", {110, 95, 40, 25}),
                   button("taro_tea", "Taro Milk Tea", {300, 60, 95, 32}, "customize"),
                   button("add_taro", "Add", {400, 60, 40, 32}, "customize"),
                   label("price_taro", "5.00", {300, 95, 40, 25}),
                   button("mango_tea", "Mango Green Tea", {110, 210, 110, 32}, "customize"),
                   button("add_mango", "Add", {225, 210, 40, 32}, "customize"),
                   button("brown_sugar", "Brown Sugar Boba", {320, 210, 110, 32}, "customize"),
                   button("add_brown_sugar", "Add", {435, 210, 40, 32}, "customize")}};
  ScreenSpec customize{"customize",
                       {label("title", "Avocado Tea", {200, 12, 130, 28}),
                        label("sugar_label", "Sugar Level", {60, 60, 110, 28}),
                        button("no_sugar", "No Sugar", {60, 100, 70, 32}),
                        button("half_sugar", "Half Sugar", {140, 100, 70, 32}),
                        button("full_sugar", "Full Sugar", {220, 100, 70, 32}),
                        button("add_cart", "Add Cart", {215, 170, 50, 30}, "cart"),
                        button("back", "Back", {420, 240, 60, 30}, "menu")}};
  ScreenSpec cart{"cart",
                  {label("title", "Your Cart", {60, 15, 150, 28}),
                   label("line_item", "Avocado Tea Half Sugar", {60, 60, 200, 28}),
                   label("total", "Total 5.50", {60, 100, 120, 28}),
                   button("check_out", "Check Out", {400, 200, 80, 35}, "done"),
                   button("continue", "Continue Shopping", {60, 200, 130, 35}, "menu")}};
  ScreenSpec done{"done",
                  {label("thanks", "Thank You", {200, 60, 130, 30}),
                   label("order_number", "Order Number 42", {180, 110, 170, 30}),
                   button("new_order", "New Order", {220, 200, 90, 35}, "menu")}};
  return assemble(kBubbleTea, 24, {menu, customize, cart, done}, {505, 160, 18});
}

}  // namespace

std::vector<std::string> evaluation_ids() { return {kLocker, kAirport, kRestaurant, kMallMap, kMonochrome}; }

std::pair<double, double> screen_size_mm(double diagonal_in) {
  const double d = diagonal_in * 25.4;
  const double k = std::sqrt(16.0 * 16.0 + 9.0 * 9.0);
  auto snap = [](double mm) { return std::round(mm / kMmPerPixel) * kMmPerPixel; };
  return {snap(d * 16.0 / k), snap(d * 9.0 / k)};
}

InterfaceRecord build(const std::string& interface_id) {
  static const std::vector<std::pair<std::string, std::function<InterfaceRecord()>>> builders{
      {kLocker, locker}, {kAirport, airport}, {kRestaurant, restaurant}, {kMallMap, mall_map},
      {kMonochrome, monochrome}, {kBubbleTea, bubble_tea}};
  for (const auto& [id, fn] : builders)
    if (id == interface_id) return fn();
  throw Error(ErrorKind::SchemaError, "no fixture named " + interface_id);
}

std::vector<InterfaceRecord> build_all() {
  std::vector<InterfaceRecord> out;
  for (const auto& id : evaluation_ids()) out.push_back(build(id));
  out.push_back(build(kBubbleTea));
  return out;
}

void write_database(const std::filesystem::path& dir) {
  for (const auto& rec : build_all()) save_interface(rec, dir);
}

}  // namespace kioskbot::fixtures
