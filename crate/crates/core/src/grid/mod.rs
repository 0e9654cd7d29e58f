//! CookieWorld and SymbolWorld: deterministic, partially observable grid
//! worlds in which the agent only sees the contents of the room it occupies.

mod map;

pub use map::{
    Cell, GridMap, MapError, Room, Tile, DEFAULT_COOKIE_MAP, DEFAULT_SYMBOL_MAP,
};

use rand::Rng;
use thiserror::Error;

use crate::env::{Action, EnvError, Environment, ObsKey, Status, StepOutcome};
use crate::label::{Alphabet, LabelSet};
use crate::qrm::{Hyperparams, Updates};
use crate::rm::{self, RewardMachine};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Club,
    Spade,
    Diamond,
}

impl SymbolKind {
    pub const ALL: [SymbolKind; 3] = [SymbolKind::Club, SymbolKind::Spade, SymbolKind::Diamond];

    pub fn seen_event(self) -> &'static str {
        match self {
            SymbolKind::Club => "sym_club",
            SymbolKind::Spade => "sym_spade",
            SymbolKind::Diamond => "sym_diamond",
        }
    }

    pub fn got_event(self) -> &'static str {
        match self {
            SymbolKind::Club => "got_club",
            SymbolKind::Spade => "got_spade",
            SymbolKind::Diamond => "got_diamond",
        }
    }
}

/// Which room the target symbol has to be collected in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constraint {
    /// Green room.
    Right,
    /// Either room.
    None,
    /// Blue room.
    Left,
}

impl Constraint {
    pub const ALL: [Constraint; 3] = [Constraint::Right, Constraint::None, Constraint::Left];

    pub fn arrow_event(self) -> Option<&'static str> {
        match self {
            Constraint::Right => Some("arrow_right"),
            Constraint::None => None,
            Constraint::Left => Some("arrow_left"),
        }
    }

    pub fn allows(self, room: Room) -> bool {
        match self {
            Constraint::Right => room == Room::Green,
            Constraint::Left => room == Room::Blue,
            Constraint::None => room != Room::Orange,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Cookie,
    Symbol,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::Cookie => "cookie",
            Domain::Symbol => "symbol",
        }
    }

    pub fn default_map(self) -> &'static str {
        match self {
            Domain::Cookie => DEFAULT_COOKIE_MAP,
            Domain::Symbol => DEFAULT_SYMBOL_MAP,
        }
    }

    pub fn reward_machine(self) -> RewardMachine {
        match self {
            Domain::Cookie => rm::cookieworld_rm(),
            Domain::Symbol => rm::symbolworld_rm(),
        }
    }

    /// Training defaults for this domain.
    ///
    /// CookieWorld's machine state encodes where the cookie spawned, so it
    /// learns from on-policy updates only; those are unstable at a high
    /// learning rate, hence the early stop. SymbolWorld uses counterfactual
    /// updates over the whole budget with a small learning rate, which keeps
    /// the tables of task states the agent rarely occupies consistent.
    pub fn default_hyperparams(self) -> Hyperparams {
        match self {
            Domain::Cookie => Hyperparams {
                updates: Updates::Current,
                ..Hyperparams::default()
            },
            Domain::Symbol => Hyperparams {
                alpha: 0.1,
                early_stop: false,
                ..Hyperparams::default()
            },
        }
    }

    pub fn from_name(name: &str) -> Option<Domain> {
        match name {
            "cookie" => Some(Domain::Cookie),
            "symbol" => Some(Domain::Symbol),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("{domain} map needs {what}")]
    MissingDomainCell {
        domain: &'static str,
        what: &'static str,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WorldState {
    Cookie { cookie: Option<Cell> },
    Symbol { target: SymbolKind, constraint: Constraint },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EnvState {
    pub agent: Cell,
    pub world: WorldState,
    pub step_count: u32,
    pub status: Status,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoomView {
    Cookie { cookie_visible: bool },
    /// Populated only inside the orange room.
    Symbol { display: Option<(SymbolKind, Constraint)> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Observation {
    pub agent: Cell,
    pub room: Option<Room>,
    pub view: RoomView,
}

/// Ground-truth facts about a single transition that are not visible in the
/// next observation alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TransitionEvents {
    pub pressed: bool,
    pub eaten: bool,
    pub collected: Option<SymbolKind>,
}

#[derive(Debug, Clone, Copy)]
struct EventIndex {
    rooms: [usize; 3],
    button: usize,
    cookie: usize,
    eaten: usize,
    seen: [usize; 3],
    got: [usize; 3],
    arrow_right: usize,
    arrow_left: usize,
}

pub const DEFAULT_STEP_LIMIT: u32 = 500;

#[derive(Debug, Clone)]
pub struct GridEnv {
    map: GridMap,
    domain: Domain,
    alphabet: Alphabet,
    events: EventIndex,
    step_limit: u32,
}

/// CookieWorld on `map`: needs a button and a cookie cell in both the green
/// and the blue room.
pub fn cookie_world(map: GridMap) -> Result<GridEnv, GridError> {
    let missing = |what| GridError::MissingDomainCell {
        domain: "cookie",
        what,
    };
    map.button().ok_or(missing("a button cell"))?;
    map.cookie_cell(Room::Green).ok_or(missing("a cookie cell in the green room"))?;
    map.cookie_cell(Room::Blue).ok_or(missing("a cookie cell in the blue room"))?;
    Ok(GridEnv::new(map, Domain::Cookie))
}

/// SymbolWorld on `map`: needs a display and all three symbols in both the
/// green and the blue room.
pub fn symbol_world(map: GridMap) -> Result<GridEnv, GridError> {
    let missing = |what| GridError::MissingDomainCell {
        domain: "symbol",
        what,
    };
    map.display().ok_or(missing("a display cell"))?;
    for room in [Room::Green, Room::Blue] {
        for kind in SymbolKind::ALL {
            if !map.symbol_cells().iter().any(|(r, k, _)| *r == room && *k == kind) {
                return Err(missing("every symbol in both the green and the blue room"));
            }
        }
    }
    Ok(GridEnv::new(map, Domain::Symbol))
}

impl GridEnv {
    fn new(map: GridMap, domain: Domain) -> GridEnv {
        let alphabet = domain.reward_machine().alphabet().clone();
        let idx = |name: &str| alphabet.index_of(name).unwrap_or(usize::MAX);
        let events = EventIndex {
            rooms: Room::ALL.map(|r| idx(r.event())),
            button: idx("button"),
            cookie: idx("cookie"),
            eaten: idx("eaten"),
            seen: SymbolKind::ALL.map(|s| idx(s.seen_event())),
            got: SymbolKind::ALL.map(|s| idx(s.got_event())),
            arrow_right: idx("arrow_right"),
            arrow_left: idx("arrow_left"),
        };
        GridEnv {
            map,
            domain,
            alphabet,
            events,
            step_limit: DEFAULT_STEP_LIMIT,
        }
    }

    /// Builds the environment for `domain` on its default map.
    pub fn builtin(domain: Domain) -> GridEnv {
        let map = GridMap::parse(domain.default_map()).expect("default maps are valid");
        match domain {
            Domain::Cookie => cookie_world(map),
            Domain::Symbol => symbol_world(map),
        }
        .expect("default maps satisfy their domain")
    }

    pub fn with_step_limit(mut self, step_limit: u32) -> Self {
        self.step_limit = step_limit.max(1);
        self
    }

    pub fn step_limit(&self) -> u32 {
        self.step_limit
    }

    pub fn map(&self) -> &GridMap {
        &self.map
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// The reward machine describing this environment's task.
    pub fn companion_rm(&self) -> RewardMachine {
        self.domain.reward_machine()
    }

    /// Initial state for a given SymbolWorld task, bypassing the random draw.
    pub fn reset_with_task(&self, target: SymbolKind, constraint: Constraint) -> StepOutcome<EnvState, Observation> {
        self.initial(WorldState::Symbol { target, constraint })
    }

    fn initial(&self, world: WorldState) -> StepOutcome<EnvState, Observation> {
        let state = EnvState {
            agent: self.map.start(),
            world,
            step_count: 0,
            status: Status::Running,
        };
        let observation = self.observe(&state);
        let label = self.label_of(&observation, &observation, TransitionEvents::default());
        StepOutcome {
            state,
            observation,
            label,
            status: Status::Running,
        }
    }

    pub fn observe(&self, state: &EnvState) -> Observation {
        let room = self.map.room(state.agent);
        let view = match state.world {
            WorldState::Cookie { cookie } => RoomView::Cookie {
                cookie_visible: room.is_some() && cookie.is_some_and(|c| self.map.room(c) == room),
            },
            WorldState::Symbol { target, constraint } => RoomView::Symbol {
                display: (room == Some(Room::Orange)).then_some((target, constraint)),
            },
        };
        Observation {
            agent: state.agent,
            room,
            view,
        }
    }

    /// Labelling function: the events that hold after moving from `_prev`
    /// into `next`. Hallway cells carry no room event.
    pub fn label_of(&self, _prev: &Observation, next: &Observation, events: TransitionEvents) -> LabelSet {
        let ev = &self.events;
        let mut label = LabelSet::EMPTY;
        if let Some(room) = next.room {
            label.insert(ev.rooms[room as usize]);
        }
        match next.view {
            RoomView::Cookie { cookie_visible } => {
                if events.pressed {
                    label.insert(ev.button);
                }
                if cookie_visible {
                    label.insert(ev.cookie);
                }
                if events.eaten {
                    label.insert(ev.eaten);
                }
            }
            RoomView::Symbol { display } => {
                if let Some((symbol, constraint)) = display {
                    label.insert(ev.seen[symbol as usize]);
                    match constraint {
                        Constraint::Right => label.insert(ev.arrow_right),
                        Constraint::Left => label.insert(ev.arrow_left),
                        Constraint::None => {}
                    }
                }
                if let Some(symbol) = events.collected {
                    label.insert(ev.got[symbol as usize]);
                }
            }
        }
        label
    }

    /// Distinct observation codes per cell.
    const VIEW_CODES: u32 = 10;

    fn view_code(view: RoomView) -> u32 {
        match view {
            RoomView::Cookie { cookie_visible } => cookie_visible as u32,
            RoomView::Symbol { display: None } => 0,
            RoomView::Symbol {
                display: Some((s, c)),
            } => 1 + (s as u32) * 3 + c as u32,
        }
    }
}

impl Environment for GridEnv {
    type State = EnvState;
    type Observation = Observation;

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn reset<R: Rng + ?Sized>(&self, rng: &mut R) -> StepOutcome<EnvState, Observation> {
        let world = match self.domain {
            Domain::Cookie => WorldState::Cookie { cookie: None },
            Domain::Symbol => {
                let task = rng.random_range(0..9usize);
                WorldState::Symbol {
                    target: SymbolKind::ALL[task / 3],
                    constraint: Constraint::ALL[task % 3],
                }
            }
        };
        self.initial(world)
    }

    fn step<R: Rng + ?Sized>(
        &self,
        state: &EnvState,
        action: Action,
        rng: &mut R,
    ) -> Result<StepOutcome<EnvState, Observation>, EnvError> {
        if state.status.is_done() {
            return Err(EnvError::EpisodeFinished);
        }
        let prev = self.observe(state);
        let mut next = *state;
        next.agent = self.map.moved(state.agent, action.delta());
        next.step_count += 1;
        let mut events = TransitionEvents::default();

        match &mut next.world {
            WorldState::Cookie { cookie } => {
                let button = self.map.button();
                if Some(next.agent) == button && Some(state.agent) != button {
                    events.pressed = true;
                    let room = if rng.random_range(0..2u32) == 0 {
                        Room::Green
                    } else {
                        Room::Blue
                    };
                    *cookie = self.map.cookie_cell(room);
                }
                if *cookie == Some(next.agent) {
                    events.eaten = true;
                    *cookie = None;
                    next.status = Status::Success;
                }
            }
            WorldState::Symbol { target, constraint } => {
                if let Some((room, symbol)) = self.map.symbol_at(next.agent) {
                    events.collected = Some(symbol);
                    next.status = if symbol == *target && constraint.allows(room) {
                        Status::Success
                    } else {
                        Status::Failure
                    };
                }
            }
        }
        if next.status == Status::Running && next.step_count >= self.step_limit {
            next.status = Status::Timeout;
        }
        let observation = self.observe(&next);
        let label = self.label_of(&prev, &observation, events);
        Ok(StepOutcome {
            state: next,
            observation,
            label,
            status: next.status,
        })
    }

    fn observation_key(&self, observation: &Observation) -> ObsKey {
        let cell = self.map.index(observation.agent) as u32;
        ObsKey(cell * Self::VIEW_CODES + Self::view_code(observation.view))
    }
}
