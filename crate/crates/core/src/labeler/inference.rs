//! Exact MAP inference for a linear chain with the three global
//! constraints folded into an augmented state.
//!
//! State after position t: (label, attribute seen, type status), where type
//! status is 0 = no x.type yet, 1 = x.type inside the current sentence,
//! 2 = x.type seen in an earlier sentence only. Opening a new type sentence
//! from status 2 costs the same-sentence penalty once, so the penalty paid
//! equals (number of type sentences − 1). Ties are resolved toward the
//! lexicographically smallest label sequence by a backward value pass
//! followed by a greedy forward pass.

/// Scores for one sequence: `emissions[t][y]` and `transitions[prev][next]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub emissions: Vec<Vec<f64>>,
    pub transitions: Vec<Vec<f64>>,
    pub sentences: Vec<usize>,
}

impl Lattice {
    pub fn len(&self) -> usize {
        self.emissions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.emissions.is_empty()
    }

    pub fn num_labels(&self) -> usize {
        self.transitions.len()
    }

    /// Unpenalized chain score of `labels`.
    pub fn score(&self, labels: &[usize]) -> f64 {
        let mut s = 0.0;
        for (t, &y) in labels.iter().enumerate() {
            s += self.emissions[t][y];
            if t > 0 {
                s += self.transitions[labels[t - 1]][y];
            }
        }
        s
    }
}

/// Constraint penalties expressed over label indices.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Penalties {
    pub type_label: Option<usize>,
    pub attr_label: Option<usize>,
    /// Hard constraint: at least one `type_label` token.
    pub require_type: bool,
    /// Penalty when no `attr_label` token is present.
    pub attr_rho: f64,
    /// Penalty per additional sentence containing a `type_label` token.
    pub same_sentence_rho: f64,
}

impl Penalties {
    pub fn none() -> Self {
        Penalties::default()
    }

    fn require(&self) -> bool {
        self.require_type && self.type_label.is_some()
    }

    /// Penalized objective of a complete labeling; `-inf` if the hard
    /// constraint is violated.
    pub fn objective(&self, lattice: &Lattice, labels: &[usize]) -> f64 {
        let mut value = lattice.score(labels);
        let mut type_sentences: Vec<usize> = Vec::new();
        let mut attr = false;
        for (t, &y) in labels.iter().enumerate() {
            if Some(y) == self.type_label && !type_sentences.contains(&lattice.sentences[t]) {
                type_sentences.push(lattice.sentences[t]);
            }
            attr |= Some(y) == self.attr_label;
        }
        if self.require() && type_sentences.is_empty() {
            return f64::NEG_INFINITY;
        }
        if !attr {
            value -= self.attr_rho;
        }
        value -= self.same_sentence_rho * type_sentences.len().saturating_sub(1) as f64;
        value
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub labels: Vec<usize>,
    pub objective: f64,
}

const TIE_EPS: f64 = 1e-9;

#[derive(Clone, Copy)]
struct State {
    label: usize,
    attr: bool,
    ty: u8,
}

struct Machine<'a> {
    lattice: &'a Lattice,
    pen: Penalties,
    require: bool,
    nl: usize,
}

impl Machine<'_> {
    fn index(&self, s: State) -> usize {
        (s.label * 2 + s.attr as usize) * 3 + s.ty as usize
    }

    fn num_states(&self) -> usize {
        self.nl * 6
    }

    fn state(&self, idx: usize) -> State {
        State {
            label: idx / 6,
            attr: (idx / 3) % 2 == 1,
            ty: (idx % 3) as u8,
        }
    }

    /// Successor state and incremental penalty for moving to label `y` at
    /// position `t`. `prev` is `None` at t = 0.
    fn step(&self, prev: Option<State>, t: usize, y: usize) -> (State, f64) {
        let (mut attr, mut ty) = match prev {
            None => (false, 0u8),
            Some(p) => {
                let ty = if p.ty == 1 && self.lattice.sentences[t] != self.lattice.sentences[t - 1] {
                    2
                } else {
                    p.ty
                };
                (p.attr, ty)
            }
        };
        let mut cost = 0.0;
        if Some(y) == self.pen.type_label {
            if ty == 2 {
                cost -= self.pen.same_sentence_rho;
            }
            ty = 1;
        }
        if Some(y) == self.pen.attr_label {
            attr = true;
        }
        (State { label: y, attr, ty }, cost)
    }

    fn terminal(&self, s: State) -> f64 {
        if self.require && s.ty == 0 {
            return f64::NEG_INFINITY;
        }
        if s.attr {
            0.0
        } else {
            -self.pen.attr_rho
        }
    }

    fn allowed<'b>(&self, clamps: Option<&'b [Option<usize>]>, t: usize) -> impl Iterator<Item = usize> + 'b {
        let fixed = clamps.and_then(|c| c[t]);
        let nl = self.nl;
        (0..nl).filter(move |&y| fixed.is_none_or(|f| f == y))
    }

    fn solve(&self, clamps: Option<&[Option<usize>]>) -> Option<Decoded> {
        let n = self.lattice.len();
        if n == 0 {
            return None;
        }
        let ns = self.num_states();
        let em = &self.lattice.emissions;
        let tr = &self.lattice.transitions;
        // value[t][s]: best completion from position t + 1 given state s at t.
        let mut value = vec![vec![f64::NEG_INFINITY; ns]; n];
        for s in 0..ns {
            value[n - 1][s] = self.terminal(self.state(s));
        }
        for t in (0..n - 1).rev() {
            for s in 0..ns {
                let st = self.state(s);
                let mut best = f64::NEG_INFINITY;
                for y in self.allowed(clamps, t + 1) {
                    let (next, cost) = self.step(Some(st), t + 1, y);
                    let v = tr[st.label][y] + em[t + 1][y] + cost + value[t + 1][self.index(next)];
                    if v > best {
                        best = v;
                    }
                }
                value[t][s] = best;
            }
        }
        let mut labels = Vec::with_capacity(n);
        let mut prev: Option<State> = None;
        for t in 0..n {
            let mut cands = Vec::new();
            for y in self.allowed(clamps, t) {
                let (next, cost) = self.step(prev, t, y);
                let link = prev.map_or(0.0, |p| tr[p.label][y]);
                cands.push((y, next, link + em[t][y] + cost + value[t][self.index(next)]));
            }
            let best = cands.iter().map(|c| c.2).fold(f64::NEG_INFINITY, f64::max);
            if best == f64::NEG_INFINITY {
                return None;
            }
            let (y, next, _) = *cands
                .iter()
                .find(|c| c.2 >= best - TIE_EPS * best.abs().max(1.0))
                .expect("a candidate attains the maximum");
            labels.push(y);
            prev = Some(next);
        }
        let objective = self.pen.objective(self.lattice, &labels);
        Some(Decoded { labels, objective })
    }
}

/// Exact argmax of the penalized objective, optionally with some positions
/// clamped to fixed labels. If clamps make the hard constraint
/// unsatisfiable, it is lifted and the soft-penalized problem is solved.
pub fn decode(lattice: &Lattice, pen: &Penalties, clamps: Option<&[Option<usize>]>) -> Decoded {
    if lattice.is_empty() {
        return Decoded {
            labels: Vec::new(),
            objective: 0.0,
        };
    }
    if let Some(c) = clamps {
        assert_eq!(c.len(), lattice.len(), "clamp vector length");
    }
    let nl = lattice.num_labels();
    let strict = Machine {
        lattice,
        pen: *pen,
        require: pen.require(),
        nl,
    };
    if let Some(d) = strict.solve(clamps) {
        return d;
    }
    let relaxed = Penalties {
        require_type: false,
        ..*pen
    };
    Machine {
        lattice,
        pen: relaxed,
        require: false,
        nl,
    }
    .solve(clamps)
    .expect("unconstrained problem is feasible")
}

/// Plain Viterbi with the same tie-breaking rule.
pub fn viterbi(lattice: &Lattice) -> Decoded {
    decode(lattice, &Penalties::none(), None)
}
