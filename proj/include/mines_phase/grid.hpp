#pragma once

// Formal game model: grids, neighborhoods, mine assignments, grid states,
// consistency, Reveal and the zero-flood expansion.

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mines_phase {

/// Thrown when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Thrown by the text readers on malformed input.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Cell {
  int row = 0;
  int col = 0;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

inline std::ostream& operator<<(std::ostream& os, Cell c) {
  return os << '(' << c.row << ',' << c.col << ')';
}

struct GridDims {
  int rows = 0;
  int cols = 0;

  GridDims() = default;
  GridDims(int r, int c) : rows(r), cols(c) {
    if (r < 1 || c < 1)
      throw ContractViolation("grid dimensions must be positive");
  }

  std::size_t size() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
  bool contains(Cell c) const { return c.row >= 0 && c.row < rows && c.col >= 0 && c.col < cols; }
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c.col);
  }
  Cell cell(std::size_t i) const {
    return {static_cast<int>(i / static_cast<std::size_t>(cols)), static_cast<int>(i % static_cast<std::size_t>(cols))};
  }

  friend bool operator==(const GridDims&, const GridDims&) = default;
};

namespace detail {

[[noreturn, gnu::noinline, gnu::cold]] inline void throw_out_of_bounds(GridDims dims, Cell c) {
  std::ostringstream os;
  os << "cell " << c << " outside " << dims.rows << "x" << dims.cols << " grid";
  throw ContractViolation(os.str());
}

}  // namespace detail

inline void require_in_bounds(GridDims dims, Cell c) {
  if (!dims.contains(c)) [[unlikely]]
    detail::throw_out_of_bounds(dims, c);
}

/// N(c): the cell itself plus the cells touching it, clipped at the border.
class Neighborhood {
public:
  Neighborhood(Cell c, GridDims dims) {
    require_in_bounds(dims, c);
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc) {
        Cell n{c.row + dr, c.col + dc};
        if (dims.contains(n)) cells_[count_++] = n;
      }
  }

  const Cell* begin() const { return cells_.data(); }
  const Cell* end() const { return cells_.data() + count_; }
  std::size_t size() const { return count_; }

private:
  std::array<Cell, 9> cells_{};
  std::size_t count_ = 0;
};

inline Neighborhood neighbors(Cell c, GridDims dims) { return Neighborhood(c, dims); }

/// Graph distance in the king-move graph.
inline int grid_distance(Cell a, Cell b) {
  return std::max(std::abs(a.row - b.row), std::abs(a.col - b.col));
}

/// Ground-truth mine placement. Keeps a dense byte plane and the list of mines.
class MineAssignment {
public:
  MineAssignment() = default;
  explicit MineAssignment(GridDims dims) : dims_(dims), plane_(dims.size(), 0) {}
  MineAssignment(GridDims dims, const std::vector<Cell>& mines) : MineAssignment(dims) {
    for (Cell c : mines) add_mine(c);
  }

  GridDims dims() const { return dims_; }
  bool is_mine(Cell c) const { return plane_[dims_.index(c)] != 0; }
  bool is_mine_index(std::size_t i) const { return plane_[i] != 0; }
  std::size_t mine_count() const { return mines_.size(); }
  /// Mines in insertion order.
  const std::vector<Cell>& mines() const { return mines_; }
  std::vector<Cell> sorted_mines() const {
    auto out = mines_;
    std::sort(out.begin(), out.end());
    return out;
  }
  const std::vector<std::uint8_t>& plane() const { return plane_; }

  /// Returns false if the cell was already mined.
  bool add_mine(Cell c) {
    require_in_bounds(dims_, c);
    auto& v = plane_[dims_.index(c)];
    if (v) return false;
    v = 1;
    mines_.push_back(c);
    return true;
  }

  bool remove_mine(Cell c) {
    require_in_bounds(dims_, c);
    auto& v = plane_[dims_.index(c)];
    if (!v) return false;
    v = 0;
    mines_.erase(std::find(mines_.begin(), mines_.end(), c));
    return true;
  }

  friend bool operator==(const MineAssignment& a, const MineAssignment& b) {
    return a.dims_ == b.dims_ && a.plane_ == b.plane_;
  }

private:
  GridDims dims_;
  std::vector<std::uint8_t> plane_;
  std::vector<Cell> mines_;
};

/// One of hidden, clue 0..8, flag, shown mine.
class CellValue {
public:
  constexpr CellValue() = default;

  static constexpr CellValue hidden() { return CellValue(kHidden); }
  static constexpr CellValue flag() { return CellValue(kFlag); }
  static constexpr CellValue shown_mine() { return CellValue(kShownMine); }
  static CellValue clue(int k) {
    if (k < 0 || k > 8) throw ContractViolation("clue value out of range 0..8");
    return CellValue(static_cast<std::uint8_t>(k));
  }

  constexpr bool is_hidden() const { return code_ == kHidden; }
  constexpr bool is_clue() const { return code_ <= 8; }
  constexpr bool is_flag() const { return code_ == kFlag; }
  constexpr bool is_shown_mine() const { return code_ == kShownMine; }
  constexpr int clue() const { return code_; }
  constexpr std::uint8_t code() const { return code_; }

  friend constexpr bool operator==(CellValue, CellValue) = default;

private:
  static constexpr std::uint8_t kHidden = 9;
  static constexpr std::uint8_t kFlag = 10;
  static constexpr std::uint8_t kShownMine = 11;

  constexpr explicit CellValue(std::uint8_t code) : code_(code) {}
  std::uint8_t code_ = kHidden;
};

/// The player's view of the board.
class GridState {
public:
  GridState() = default;
  /// All-hidden state.
  explicit GridState(GridDims dims) : dims_(dims), values_(dims.size(), CellValue::hidden()) {}

  GridDims dims() const { return dims_; }
  CellValue at(Cell c) const { return values_[dims_.index(c)]; }
  CellValue at_index(std::size_t i) const { return values_[i]; }
  void set(Cell c, CellValue v) {
    require_in_bounds(dims_, c);
    values_[dims_.index(c)] = v;
  }
  void set_index(std::size_t i, CellValue v) { values_[i] = v; }
  const std::vector<CellValue>& values() const { return values_; }

  std::size_t count_hidden() const {
    return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [](CellValue v) { return v.is_hidden(); }));
  }
  std::vector<Cell> hidden_cells() const {
    std::vector<Cell> out;
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (values_[i].is_hidden()) out.push_back(dims_.cell(i));
    return out;
  }

  friend bool operator==(const GridState&, const GridState&) = default;

private:
  GridDims dims_;
  std::vector<CellValue> values_;
};

/// Number of mines in N(c). Counts c itself, so a mined cell sees its own mine.
inline int clue_value(const MineAssignment& m, Cell c) {
  int k = 0;
  for (Cell n : neighbors(c, m.dims()))
    k += m.is_mine(n) ? 1 : 0;
  return k;
}

inline bool is_consistent(const MineAssignment& m, const GridState& s) {
  if (!(m.dims() == s.dims())) throw ContractViolation("mine assignment and grid state differ in dimensions");
  const GridDims dims = m.dims();
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const CellValue v = s.at_index(i);
    if (v.is_hidden()) continue;
    if (v.is_clue()) {
      if (m.is_mine_index(i) || v.clue() != clue_value(m, dims.cell(i))) return false;
    } else if (!m.is_mine_index(i)) {
      return false;
    }
  }
  return true;
}

namespace detail {

inline void require_revealable(const MineAssignment& m, const GridState& s, Cell c) {
  if (!(m.dims() == s.dims())) throw ContractViolation("mine assignment and grid state differ in dimensions");
  require_in_bounds(m.dims(), c);
  if (!s.at(c).is_hidden()) {
    std::ostringstream os;
    os << "cell " << c << " is not hidden";
    throw ContractViolation(os.str());
  }
}

inline CellValue revealed_value(const MineAssignment& m, Cell c) {
  return m.is_mine(c) ? CellValue::shown_mine() : CellValue::clue(clue_value(m, c));
}

}  // namespace detail

/// Reveal(M, S, c). Validates consistency of (m, s), which costs O(n);
/// hot paths use reveal_in_place.
inline GridState reveal(const MineAssignment& m, GridState s, Cell c) {
  detail::require_revealable(m, s, c);
  if (!is_consistent(m, s)) throw ContractViolation("reveal on an inconsistent (assignment, state) pair");
  s.set(c, detail::revealed_value(m, c));
  return s;
}

/// Unchecked-consistency reveal. Returns the value written.
inline CellValue reveal_in_place(const MineAssignment& m, GridState& s, Cell c) {
  detail::require_revealable(m, s, c);
  const CellValue v = detail::revealed_value(m, c);
  s.set(c, v);
  return v;
}

enum class FloodOrder { lifo, fifo };

struct FloodStats {
  std::size_t pushes = 0;
  std::size_t pops = 0;
  std::size_t revealed = 0;
};

/// In-place zero-flood from `start`. Returns the number of cells revealed.
/// Duplicate worklist entries are allowed and skipped on pop.
inline std::size_t flood_reveal_in_place(const MineAssignment& m, GridState& s, Cell start,
                                         FloodOrder order = FloodOrder::lifo, FloodStats* stats = nullptr,
                                         const std::function<void(Cell, CellValue)>& on_reveal = {}) {
  detail::require_revealable(m, s, start);
  const GridDims dims = m.dims();
  std::size_t revealed = 0;
  auto open = [&](Cell c) {
    const CellValue v = detail::revealed_value(m, c);
    s.set(c, v);
    ++revealed;
    if (on_reveal) on_reveal(c, v);
    return v;
  };
  if (open(start) != CellValue::clue(0)) {
    if (stats) stats->revealed += revealed;
    return revealed;
  }

  std::vector<Cell> work;
  std::size_t head = 0;
  std::size_t pushes = 0, pops = 0;
  auto push_hidden_neighbors = [&](Cell c) {
    for (Cell n : neighbors(c, dims))
      if (s.at(n).is_hidden()) {
        work.push_back(n);
        ++pushes;
      }
  };
  push_hidden_neighbors(start);
  while (head < work.size()) {
    Cell c;
    if (order == FloodOrder::lifo) {
      c = work.back();
      work.pop_back();
    } else {
      c = work[head++];
    }
    ++pops;
    if (!s.at(c).is_hidden()) continue;
    // Neighbors of a zero are never mines.
    if (open(c) == CellValue::clue(0)) push_hidden_neighbors(c);
  }
  if (stats) {
    stats->pushes += pushes;
    stats->pops += pops;
    stats->revealed += revealed;
  }
  return revealed;
}

inline GridState flood_reveal(const MineAssignment& m, GridState s, Cell start, FloodOrder order = FloodOrder::lifo,
                              FloodStats* stats = nullptr) {
  flood_reveal_in_place(m, s, start, order, stats);
  return s;
}

/// No shown mine anywhere and every hidden cell is a mine.
inline bool is_solved(const MineAssignment& m, const GridState& s) {
  if (!(m.dims() == s.dims())) throw ContractViolation("mine assignment and grid state differ in dimensions");
  for (std::size_t i = 0; i < s.values().size(); ++i) {
    const CellValue v = s.at_index(i);
    if (v.is_shown_mine()) return false;
    if (v.is_hidden() && !m.is_mine_index(i)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Text format: "rows cols\n" then one line per row, trailing newline, no other
// whitespace. Mines: '.' empty, '*' mine. States: '#', '0'..'8', 'F', '!'.

namespace detail {

inline GridDims read_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header line");
  const auto sp = line.find(' ');
  if (sp == std::string::npos || line.find(' ', sp + 1) != std::string::npos)
    throw ParseError("header must be \"rows cols\"");
  auto parse_int = [](const std::string& s) {
    if (s.empty() || s.size() > 9 || !std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
      throw ParseError("bad integer in header: '" + s + "'");
    return std::stoi(s);
  };
  const int rows = parse_int(line.substr(0, sp));
  const int cols = parse_int(line.substr(sp + 1));
  if (rows < 1 || cols < 1) throw ParseError("grid dimensions must be positive");
  return {rows, cols};
}

template <typename OnChar>
void read_rows(std::istream& in, GridDims dims, OnChar&& on_char) {
  std::string line;
  for (int r = 0; r < dims.rows; ++r) {
    if (!std::getline(in, line)) throw ParseError("expected " + std::to_string(dims.rows) + " rows");
    if (in.eof()) throw ParseError("missing trailing newline");
    if (static_cast<int>(line.size()) != dims.cols)
      throw ParseError("row " + std::to_string(r) + " has length " + std::to_string(line.size()));
    for (int c = 0; c < dims.cols; ++c) on_char(Cell{r, c}, line[static_cast<std::size_t>(c)]);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw ParseError("trailing data after grid");
}

}  // namespace detail

inline void write_grid(std::ostream& os, const MineAssignment& m) {
  const GridDims d = m.dims();
  os << d.rows << ' ' << d.cols << '\n';
  std::string line(static_cast<std::size_t>(d.cols), '.');
  for (int r = 0; r < d.rows; ++r) {
    for (int c = 0; c < d.cols; ++c) line[static_cast<std::size_t>(c)] = m.is_mine({r, c}) ? '*' : '.';
    os << line << '\n';
  }
}

inline char state_char(CellValue v) {
  if (v.is_hidden()) return '#';
  if (v.is_flag()) return 'F';
  if (v.is_shown_mine()) return '!';
  return static_cast<char>('0' + v.clue());
}

inline void write_grid(std::ostream& os, const GridState& s) {
  const GridDims d = s.dims();
  os << d.rows << ' ' << d.cols << '\n';
  std::string line(static_cast<std::size_t>(d.cols), '#');
  for (int r = 0; r < d.rows; ++r) {
    for (int c = 0; c < d.cols; ++c) line[static_cast<std::size_t>(c)] = state_char(s.at({r, c}));
    os << line << '\n';
  }
}

inline MineAssignment read_mines(std::istream& in) {
  const GridDims dims = detail::read_header(in);
  MineAssignment m(dims);
  detail::read_rows(in, dims, [&](Cell c, char ch) {
    if (ch == '*')
      m.add_mine(c);
    else if (ch != '.')
      throw ParseError(std::string("unexpected character '") + ch + "' in mine grid");
  });
  return m;
}

inline GridState read_state(std::istream& in) {
  const GridDims dims = detail::read_header(in);
  GridState s(dims);
  detail::read_rows(in, dims, [&](Cell c, char ch) {
    if (ch == '#')
      s.set(c, CellValue::hidden());
    else if (ch == 'F')
      s.set(c, CellValue::flag());
    else if (ch == '!')
      s.set(c, CellValue::shown_mine());
    else if (ch >= '0' && ch <= '8')
      s.set(c, CellValue::clue(ch - '0'));
    else
      throw ParseError(std::string("unexpected character '") + ch + "' in state grid");
  });
  return s;
}

template <typename Grid>
std::string to_text(const Grid& g) {
  std::ostringstream os;
  write_grid(os, g);
  return os.str();
}

inline MineAssignment mines_from_text(const std::string& text) {
  std::istringstream in(text);
  return read_mines(in);
}

inline GridState state_from_text(const std::string& text) {
  std::istringstream in(text);
  return read_state(in);
}

}  // namespace mines_phase
