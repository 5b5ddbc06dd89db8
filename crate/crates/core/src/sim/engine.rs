//! Exact continuous-time simulation (Gillespie direct method) in the
//! accelerated clock, with linear observables tracked event by event.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};
use crate::gasket::{Corner, GasketGraph, VertexId};
use crate::scalar::{real, Real};

use super::boundary::BoundarySpec;
use super::config::{Configuration, InitialCondition, RngStream};
use super::rates::{Event, LinearFunctional};

/// Per-event rates of one (graph, boundary) pair, in the accelerated clock.
#[derive(Debug, Clone, PartialEq)]
pub struct RateModel<T> {
    /// `5^N`, the rate of each discordant edge.
    pub bulk: T,
    /// `5^N b^{-N} λ₊(a)`.
    pub birth: [T; 3],
    /// `5^N b^{-N} λ₋(a)`.
    pub death: [T; 3],
}

impl<T: Real> RateModel<T> {
    pub fn new(g: &GasketGraph, bs: &BoundarySpec<T>) -> Self {
        let clock = |k: usize| bs.corner_clock(k, g.level());
        RateModel {
            bulk: crate::calculus::laplacian_scale(g.level()),
            birth: [0, 1, 2].map(|k| clock(k) * bs.lambda_plus[k]),
            death: [0, 1, 2].map(|k| clock(k) * bs.lambda_minus[k]),
        }
    }

    #[inline]
    fn flip(&self, k: usize, eta: u8) -> T {
        if eta == 1 {
            self.death[k]
        } else {
            self.birth[k]
        }
    }
}

/// A named linear observable `c + Σ w η`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable<T> {
    pub name: String,
    pub functional: LinearFunctional<T>,
}

impl<T> Observable<T> {
    pub fn new(name: impl Into<String>, functional: LinearFunctional<T>) -> Self {
        Observable { name: name.into(), functional }
    }
}

#[derive(Debug, Clone)]
struct Tracked<T> {
    weights: Vec<T>,
    value: T,
    integral: T,
}

/// Values and running time integrals of observables on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSeries<T> {
    pub names: Vec<String>,
    pub times: Vec<T>,
    /// `values[i][k]`: observable `i` at `times[k]`.
    pub values: Vec<Vec<T>>,
    /// `integrals[i][k] = ∫_{t_0}^{times[k]} observable_i ds`.
    pub integrals: Vec<Vec<T>>,
}

impl<T: Real> MeasurementSeries<T> {
    /// Long CSV rows `replica,t,observable,value`; integrals are listed as `int:<name>`.
    pub fn to_csv_rows(&self, replica: u64, out: &mut String) {
        for (i, name) in self.names.iter().enumerate() {
            for (k, t) in self.times.iter().enumerate() {
                out.push_str(&format!("{replica},{t},{name},{}\n", self.values[i][k]));
            }
            for (k, t) in self.times.iter().enumerate() {
                out.push_str(&format!("{replica},{t},int:{name},{}\n", self.integrals[i][k]));
            }
        }
    }

    pub fn csv_header() -> &'static str {
        "replica,t,observable,value\n"
    }
}

const ABSENT: usize = usize::MAX;

/// One running replica. Not shareable mid-run; run replicas on separate
/// engines with distinct stream ids.
#[derive(Debug, Clone)]
pub struct Engine<'g, T> {
    g: &'g GasketGraph,
    model: RateModel<T>,
    occ: Vec<u8>,
    time: T,
    rng: ChaCha8Rng,
    discordant: Vec<usize>,
    slot: Vec<usize>,
    tracked: Vec<Tracked<T>>,
    events: u64,
}

impl<'g, T: Real> Engine<'g, T> {
    pub fn new(
        g: &'g GasketGraph,
        bs: &BoundarySpec<T>,
        start: Configuration<T>,
        stream: RngStream,
    ) -> Result<Self> {
        Self::with_rng(g, bs, start, stream.rng())
    }

    /// Draws `η_0` from `init` with the replica's own stream, then starts.
    pub fn start(
        g: &'g GasketGraph,
        bs: &BoundarySpec<T>,
        init: &InitialCondition<T>,
        stream: RngStream,
    ) -> Result<Self> {
        let mut rng = stream.rng();
        let c = init.sample(g, &mut rng)?;
        Self::with_rng(g, bs, c, rng)
    }

    fn with_rng(g: &'g GasketGraph, bs: &BoundarySpec<T>, start: Configuration<T>, rng: ChaCha8Rng) -> Result<Self> {
        if start.occupation.len() != g.num_vertices() {
            return domain("initial configuration does not live on this graph");
        }
        let mut e = Engine {
            g,
            model: RateModel::new(g, bs),
            occ: start.occupation,
            time: start.time,
            rng,
            discordant: Vec::new(),
            slot: vec![ABSENT; g.num_edges()],
            tracked: Vec::new(),
            events: 0,
        };
        for (k, &(x, y)) in g.edges().iter().enumerate() {
            if e.occ[x] != e.occ[y] {
                e.insert(k);
            }
        }
        Ok(e)
    }

    #[inline]
    fn insert(&mut self, k: usize) {
        if self.slot[k] == ABSENT {
            self.slot[k] = self.discordant.len();
            self.discordant.push(k);
        }
    }

    #[inline]
    fn remove(&mut self, k: usize) {
        let s = self.slot[k];
        if s != ABSENT {
            let last = *self.discordant.last().expect("nonempty");
            self.discordant.swap_remove(s);
            if last != k {
                self.slot[last] = s;
            }
            self.slot[k] = ABSENT;
        }
    }

    fn refresh(&mut self, v: VertexId) {
        for &k in self.g.incident_edges(v) {
            let (x, y) = self.g.edges()[k];
            if self.occ[x] != self.occ[y] {
                self.insert(k);
            } else {
                self.remove(k);
            }
        }
    }

    /// Starts tracking `f`; returns its handle.
    pub fn track(&mut self, f: &LinearFunctional<T>) -> Result<usize> {
        if f.weights.len() != self.occ.len() {
            return domain("observable does not live on this graph");
        }
        self.tracked.push(Tracked { weights: f.weights.clone(), value: f.eval(&self.occ), integral: T::zero() });
        Ok(self.tracked.len() - 1)
    }

    pub fn value(&self, h: usize) -> T {
        self.tracked[h].value
    }

    /// `∫` of the observable since it started being tracked.
    pub fn integral(&self, h: usize) -> T {
        self.tracked[h].integral
    }

    pub fn time(&self) -> T {
        self.time
    }

    pub fn occupation(&self) -> &[u8] {
        &self.occ
    }

    pub fn configuration(&self) -> Configuration<T> {
        Configuration { occupation: self.occ.clone(), time: self.time }
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    pub fn total_rate(&self) -> T {
        let mut total = self.model.bulk * real::<T>(self.discordant.len() as f64);
        for k in 0..3 {
            total += self.model.flip(k, self.occ[k]);
        }
        total
    }

    fn integrate(&mut self, dt: T) {
        for t in self.tracked.iter_mut() {
            t.integral += t.value * dt;
        }
    }

    fn set(&mut self, v: VertexId, eta: u8) {
        if self.occ[v] == eta {
            return;
        }
        self.occ[v] = eta;
        let sign = if eta == 1 { T::one() } else { -T::one() };
        for t in self.tracked.iter_mut() {
            t.value += sign * t.weights[v];
        }
    }

    fn choose(&mut self, total: T) -> Event {
        let u = real::<T>(self.rng.random::<f64>()) * total;
        let bulk_total = self.model.bulk * real::<T>(self.discordant.len() as f64);
        if u < bulk_total {
            let idx = (u / self.model.bulk).to_usize().unwrap_or(0).min(self.discordant.len() - 1);
            return Event::Exchange(self.discordant[idx]);
        }
        let mut rest = u - bulk_total;
        for c in Corner::ALL {
            let r = self.model.flip(c.index(), self.occ[c.index()]);
            if rest < r {
                return Event::Flip(c);
            }
            rest -= r;
        }
        // Rounding pushed `u` past the last bucket: take the last positive one.
        Event::Flip(Corner::A2)
    }

    fn fire(&mut self, e: Event) {
        match e {
            Event::Exchange(k) => {
                let (x, y) = self.g.edges()[k];
                let (ox, oy) = (self.occ[x], self.occ[y]);
                self.set(x, oy);
                self.set(y, ox);
                self.refresh(x);
                self.refresh(y);
            }
            Event::Flip(c) => {
                let a = c.vertex();
                let new = 1 - self.occ[a];
                self.set(a, new);
                self.refresh(a);
            }
        }
        self.events += 1;
    }

    fn holding_time(&mut self, total: T) -> T {
        let u: f64 = self.rng.random();
        real::<T>(-(1.0 - u).ln()) / total
    }

    /// One Gillespie step; returns the event and its time.
    pub fn step(&mut self) -> (Event, T) {
        let total = self.total_rate();
        assert!(total > T::zero(), "corner rates are positive, so the chain never stops");
        let dt = self.holding_time(total);
        self.integrate(dt);
        self.time += dt;
        let e = self.choose(total);
        self.fire(e);
        (e, self.time)
    }

    /// Runs until `t_end`. The clock that would overshoot is discarded, which
    /// is exact by memorylessness.
    pub fn advance_to(&mut self, t_end: T) -> Result<()> {
        if t_end < self.time {
            return domain(format!("cannot run backwards from {} to {t_end}", self.time));
        }
        loop {
            let total = self.total_rate();
            assert!(total > T::zero(), "corner rates are positive, so the chain never stops");
            let dt = self.holding_time(total);
            if self.time + dt > t_end {
                self.integrate(t_end - self.time);
                self.time = t_end;
                return Ok(());
            }
            self.integrate(dt);
            self.time += dt;
            let e = self.choose(total);
            self.fire(e);
        }
    }

    /// Records every observable (value and integral since the current time)
    /// at each grid time.
    pub fn sample_path(&mut self, grid: &[T], observables: &[Observable<T>]) -> Result<MeasurementSeries<T>> {
        if grid.windows(2).any(|w| w[1] < w[0]) {
            return domain("time grid must be nondecreasing");
        }
        let first = self.tracked.len();
        for o in observables {
            self.track(&o.functional)?;
        }
        let m = observables.len();
        let mut values = vec![Vec::with_capacity(grid.len()); m];
        let mut integrals = vec![Vec::with_capacity(grid.len()); m];
        for &t in grid {
            self.advance_to(t)?;
            for i in 0..m {
                values[i].push(self.tracked[first + i].value);
                integrals[i].push(self.tracked[first + i].integral);
            }
        }
        self.tracked.truncate(first);
        Ok(MeasurementSeries {
            names: observables.iter().map(|o| o.name.clone()).collect(),
            times: grid.to_vec(),
            values,
            integrals,
        })
    }
}
