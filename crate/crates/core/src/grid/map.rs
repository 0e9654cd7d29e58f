//! ASCII grid maps.
//!
//! | glyph   | meaning                                   |
//! |---------|-------------------------------------------|
//! | `#`     | wall                                      |
//! | `H`     | floor outside any room (hallway, doorway) |
//! | `O G B` | orange, green, blue room floor            |
//! | `K`     | button (orange floor)                     |
//! | `D`     | symbol display (orange floor)             |
//! | `C`     | cookie spawn cell (colored floor)         |
//! | `1 2 3` | club, spade, diamond cell (colored floor) |
//! | `A`     | agent start                               |
//!
//! `C`, `1`-`3` and `A` take the room of their orthogonal neighbours.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use super::SymbolKind;

pub const DEFAULT_COOKIE_MAP: &str = "\
#########
#GGG#BBB#
#GCG#BCB#
#GGG#BBB#
##H###H##
#HHHHHHH#
####H####
#OOOOOOO#
#OOOKOOO#
#OOOAOOO#
#########
";

pub const DEFAULT_SYMBOL_MAP: &str = "\
#############
#BBB#OOO#GGG#
#B1B#ODO#G1G#
#B2BHOAOHG2G#
#B3B#OOO#G3G#
#############
";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("map is empty")]
    Empty,
    #[error("row {row} has {found} cells, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("unknown glyph {glyph:?} at row {row}, column {col}")]
    UnknownGlyph { glyph: char, row: usize, col: usize },
    #[error("border cell at row {row}, column {col} is not a wall")]
    OpenBorder { row: usize, col: usize },
    #[error("map has no {0} cell")]
    Missing(&'static str),
    #[error("map has more than one {0} cell")]
    Duplicate(&'static str),
    #[error("{what} at row {row}, column {col} is not inside a single colored room")]
    Unplaced { what: &'static str, row: usize, col: usize },
    #[error("{what} at row {row}, column {col} must be in the {room} room")]
    WrongRoom {
        what: &'static str,
        room: &'static str,
        row: usize,
        col: usize,
    },
    #[error("{what} at row {row}, column {col} is {distance} move(s) from a doorway, need at least 2")]
    TooCloseToDoorway {
        what: &'static str,
        row: usize,
        col: usize,
        distance: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Room {
    Orange,
    Green,
    Blue,
}

impl Room {
    pub const ALL: [Room; 3] = [Room::Orange, Room::Green, Room::Blue];

    pub fn name(self) -> &'static str {
        match self {
            Room::Orange => "orange",
            Room::Green => "green",
            Room::Blue => "blue",
        }
    }

    pub fn event(self) -> &'static str {
        match self {
            Room::Orange => "room_orange",
            Room::Green => "room_green",
            Room::Blue => "room_blue",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tile {
    Wall,
    /// Walkable; `None` for hallway and doorway cells.
    Floor(Option<Room>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    width: usize,
    height: usize,
    tiles: Vec<Tile>,
    start: Cell,
    button: Option<Cell>,
    display: Option<Cell>,
    cookie_cells: Vec<(Room, Cell)>,
    symbol_cells: Vec<(Room, SymbolKind, Cell)>,
    text: String,
}

#[derive(Clone, Copy, PartialEq)]
enum Glyph {
    Wall,
    Floor(Option<Room>),
    Start,
    Button,
    Display,
    Cookie,
    Symbol(SymbolKind),
}

impl Glyph {
    fn parse(c: char) -> Option<Glyph> {
        Some(match c {
            '#' => Glyph::Wall,
            'H' => Glyph::Floor(None),
            'O' => Glyph::Floor(Some(Room::Orange)),
            'G' => Glyph::Floor(Some(Room::Green)),
            'B' => Glyph::Floor(Some(Room::Blue)),
            'K' => Glyph::Button,
            'D' => Glyph::Display,
            'C' => Glyph::Cookie,
            '1' => Glyph::Symbol(SymbolKind::Club),
            '2' => Glyph::Symbol(SymbolKind::Spade),
            '3' => Glyph::Symbol(SymbolKind::Diamond),
            'A' => Glyph::Start,
            _ => return None,
        })
    }

    fn explicit_room(self) -> Option<Option<Room>> {
        match self {
            Glyph::Floor(r) => Some(r),
            Glyph::Button | Glyph::Display => Some(Some(Room::Orange)),
            _ => None,
        }
    }
}

impl GridMap {
    pub fn parse(text: &str) -> Result<GridMap, MapError> {
        let rows: Vec<Vec<char>> = text
            .lines()
            .map(|l| l.trim_end_matches('\r'))
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.chars().collect())
            .collect();
        let height = rows.len();
        let width = rows.first().map(Vec::len).ok_or(MapError::Empty)?;
        if width == 0 {
            return Err(MapError::Empty);
        }
        let mut glyphs = Vec::with_capacity(width * height);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(MapError::Ragged {
                    row: r,
                    expected: width,
                    found: row.len(),
                });
            }
            for (c, &ch) in row.iter().enumerate() {
                let g = Glyph::parse(ch).ok_or(MapError::UnknownGlyph {
                    glyph: ch,
                    row: r,
                    col: c,
                })?;
                let border = r == 0 || c == 0 || r + 1 == height || c + 1 == width;
                if border && g != Glyph::Wall {
                    return Err(MapError::OpenBorder { row: r, col: c });
                }
                glyphs.push(g);
            }
        }

        // Explicit rooms first, then propagate into glyphs that inherit the
        // room of their neighbours until nothing changes.
        let mut rooms: Vec<Option<Option<Room>>> = glyphs.iter().map(|g| g.explicit_room()).collect();
        loop {
            let mut changed = false;
            for i in 0..glyphs.len() {
                if rooms[i].is_some() || glyphs[i] == Glyph::Wall {
                    continue;
                }
                let cell = Cell::new(i / width, i % width);
                let mut found: Option<Room> = None;
                let mut conflict = false;
                for n in neighbours(cell, width, height) {
                    if let Some(Some(room)) = rooms[n.row * width + n.col] {
                        match found {
                            None => found = Some(room),
                            Some(f) if f != room => conflict = true,
                            Some(_) => {}
                        }
                    }
                }
                if let (Some(room), false) = (found, conflict) {
                    rooms[i] = Some(Some(room));
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        let mut tiles = Vec::with_capacity(glyphs.len());
        let mut start = None;
        let mut button = None;
        let mut display = None;
        let mut cookie_cells: Vec<(Room, Cell)> = Vec::new();
        let mut symbol_cells: Vec<(Room, SymbolKind, Cell)> = Vec::new();
        for (i, &g) in glyphs.iter().enumerate() {
            let cell = Cell::new(i / width, i % width);
            let room = rooms[i].flatten();
            let placed = |what| {
                room.ok_or(MapError::Unplaced {
                    what,
                    row: cell.row,
                    col: cell.col,
                })
            };
            match g {
                Glyph::Wall => {
                    tiles.push(Tile::Wall);
                    continue;
                }
                Glyph::Start => {
                    if start.replace(cell).is_some() {
                        return Err(MapError::Duplicate("start"));
                    }
                }
                Glyph::Button => {
                    if button.replace(cell).is_some() {
                        return Err(MapError::Duplicate("button"));
                    }
                }
                Glyph::Display => {
                    if display.replace(cell).is_some() {
                        return Err(MapError::Duplicate("display"));
                    }
                }
                Glyph::Cookie => {
                    let room = placed("cookie cell")?;
                    if room == Room::Orange {
                        return Err(MapError::Unplaced {
                            what: "cookie cell",
                            row: cell.row,
                            col: cell.col,
                        });
                    }
                    if cookie_cells.iter().any(|(r, _)| *r == room) {
                        return Err(MapError::Duplicate("cookie cell per room"));
                    }
                    cookie_cells.push((room, cell));
                }
                Glyph::Symbol(kind) => {
                    let room = placed("symbol cell")?;
                    if room == Room::Orange {
                        return Err(MapError::Unplaced {
                            what: "symbol cell",
                            row: cell.row,
                            col: cell.col,
                        });
                    }
                    if symbol_cells.iter().any(|(r, k, _)| *r == room && *k == kind) {
                        return Err(MapError::Duplicate("symbol cell per room"));
                    }
                    symbol_cells.push((room, kind, cell));
                }
                Glyph::Floor(_) => {}
            }
            tiles.push(Tile::Floor(room));
        }
        let start = start.ok_or(MapError::Missing("start"))?;

        let map = GridMap {
            width,
            height,
            tiles,
            start,
            button,
            display,
            cookie_cells,
            symbol_cells,
            text: rows
                .iter()
                .flat_map(|r| r.iter().copied().chain(core::iter::once('\n')))
                .collect(),
        };
        for &(room, cell) in &map.cookie_cells {
            map.check_doorway_distance("cookie cell", room, cell)?;
        }
        for &(room, _, cell) in &map.symbol_cells {
            map.check_doorway_distance("symbol cell", room, cell)?;
        }
        Ok(map)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn start(&self) -> Cell {
        self.start
    }

    pub fn button(&self) -> Option<Cell> {
        self.button
    }

    pub fn display(&self) -> Option<Cell> {
        self.display
    }

    pub fn cookie_cells(&self) -> &[(Room, Cell)] {
        &self.cookie_cells
    }

    pub fn cookie_cell(&self, room: Room) -> Option<Cell> {
        self.cookie_cells.iter().find(|(r, _)| *r == room).map(|(_, c)| *c)
    }

    pub fn symbol_cells(&self) -> &[(Room, SymbolKind, Cell)] {
        &self.symbol_cells
    }

    pub fn symbol_at(&self, cell: Cell) -> Option<(Room, SymbolKind)> {
        self.symbol_cells
            .iter()
            .find(|(_, _, c)| *c == cell)
            .map(|(r, k, _)| (*r, *k))
    }

    /// Normalized map text (trailing whitespace and blank lines removed).
    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn tile(&self, cell: Cell) -> Tile {
        if cell.row < self.height && cell.col < self.width {
            self.tiles[self.index(cell)]
        } else {
            Tile::Wall
        }
    }

    pub fn room(&self, cell: Cell) -> Option<Room> {
        match self.tile(cell) {
            Tile::Floor(room) => room,
            Tile::Wall => None,
        }
    }

    pub fn is_floor(&self, cell: Cell) -> bool {
        matches!(self.tile(cell), Tile::Floor(_))
    }

    pub fn index(&self, cell: Cell) -> usize {
        cell.row * self.width + cell.col
    }

    pub fn num_cells(&self) -> usize {
        self.width * self.height
    }

    /// Result of moving one cell in direction `(dr, dc)`; walls block.
    pub fn moved(&self, cell: Cell, (dr, dc): (isize, isize)) -> Cell {
        let row = cell.row as isize + dr;
        let col = cell.col as isize + dc;
        if row < 0 || col < 0 {
            return cell;
        }
        let next = Cell::new(row as usize, col as usize);
        if self.is_floor(next) {
            next
        } else {
            cell
        }
    }

    /// Hallway cells adjacent to `room`.
    pub fn doorways(&self, room: Room) -> Vec<Cell> {
        (0..self.num_cells())
            .map(|i| Cell::new(i / self.width, i % self.width))
            .filter(|&c| self.tile(c) == Tile::Floor(None))
            .filter(|&c| {
                neighbours(c, self.width, self.height).any(|n| self.room(n) == Some(room))
            })
            .collect()
    }

    /// Breadth-first move distances over floor cells from `from`.
    pub fn distances(&self, from: Cell) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.num_cells()];
        if !self.is_floor(from) {
            return dist;
        }
        let mut queue = VecDeque::new();
        dist[self.index(from)] = Some(0);
        queue.push_back(from);
        while let Some(c) = queue.pop_front() {
            let d = dist[self.index(c)].unwrap_or(0);
            for n in neighbours(c, self.width, self.height) {
                let i = self.index(n);
                if self.is_floor(n) && dist[i].is_none() {
                    dist[i] = Some(d + 1);
                    queue.push_back(n);
                }
            }
        }
        dist
    }

    fn check_doorway_distance(&self, what: &'static str, room: Room, cell: Cell) -> Result<(), MapError> {
        for door in self.doorways(room) {
            if let Some(distance) = self.distances(door)[self.index(cell)] {
                if distance < 2 {
                    return Err(MapError::TooCloseToDoorway {
                        what,
                        row: cell.row,
                        col: cell.col,
                        distance,
                    });
                }
            }
        }
        Ok(())
    }
}

fn neighbours(cell: Cell, width: usize, height: usize) -> impl Iterator<Item = Cell> {
    let Cell { row, col } = cell;
    [
        (row.wrapping_sub(1), col),
        (row + 1, col),
        (row, col.wrapping_sub(1)),
        (row, col + 1),
    ]
    .into_iter()
    .filter(move |&(r, c)| r < height && c < width)
    .map(|(r, c)| Cell::new(r, c))
}
