use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ProtocolError;

/// The four protocols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "LR1")]
    Lr1,
    #[serde(rename = "LR2")]
    Lr2,
    #[serde(rename = "GDP1")]
    Gdp1,
    #[serde(rename = "GDP2")]
    Gdp2,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Lr1, Algorithm::Lr2, Algorithm::Gdp1, Algorithm::Gdp2];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Lr1 => "LR1",
            Algorithm::Lr2 => "LR2",
            Algorithm::Gdp1 => "GDP1",
            Algorithm::Gdp2 => "GDP2",
        }
    }

    /// LR2 and GDP2 keep request lists and guest books and guard the first
    /// take with the courtesy condition.
    pub fn courteous(self) -> bool {
        matches!(self, Algorithm::Lr2 | Algorithm::Gdp2)
    }

    /// GDP1 and GDP2 pick the first fork by `nr` priority and relabel ties.
    pub fn prioritized(self) -> bool {
        matches!(self, Algorithm::Gdp1 | Algorithm::Gdp2)
    }

    /// Program counters of this algorithm in program order.
    pub fn lines(self) -> &'static [Pc] {
        use Pc::*;
        match self {
            Algorithm::Lr1 => &[Think, Choose, TakeFirst, TakeSecond, Eat, ReleaseBoth],
            Algorithm::Lr2 => &[
                Think,
                RequestLeft,
                RequestRight,
                Choose,
                TakeFirst,
                TakeSecond,
                Eat,
                RemoveRequests,
                SignGuestBooks,
                ReleaseBoth,
            ],
            Algorithm::Gdp1 => &[Think, Choose, TakeFirst, Relabel, TakeSecond, Eat, ReleaseBoth],
            Algorithm::Gdp2 => &[
                Think,
                RequestLeft,
                RequestRight,
                Choose,
                TakeFirst,
                Relabel,
                TakeSecond,
                Eat,
                RemoveRequests,
                SignGuestBooks,
                ReleaseBoth,
            ],
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ProtocolError::UnknownAlgorithm(s.to_string()))
    }
}

/// Program counter, shared by all four algorithms.
///
/// Each variant is one atomic step. The request insertion line of LR2/GDP2
/// is split into two steps (left fork first), so it has two labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Pc {
    Think,
    RequestLeft,
    RequestRight,
    Choose,
    TakeFirst,
    Relabel,
    TakeSecond,
    Eat,
    RemoveRequests,
    SignGuestBooks,
    ReleaseBoth,
}

impl Pc {
    /// The numbered line of the algorithm's table this label belongs to.
    pub fn line(self, alg: Algorithm) -> Option<u8> {
        use Pc::*;
        let line = match (alg, self) {
            (_, Think) => 1,
            (Algorithm::Lr1, Choose) => 2,
            (Algorithm::Lr1, TakeFirst) => 3,
            (Algorithm::Lr1, TakeSecond) => 4,
            (Algorithm::Lr1, Eat) => 5,
            (Algorithm::Lr1, ReleaseBoth) => 6,
            (Algorithm::Lr2, RequestLeft | RequestRight) => 2,
            (Algorithm::Lr2, Choose) => 3,
            (Algorithm::Lr2, TakeFirst) => 4,
            (Algorithm::Lr2, TakeSecond) => 5,
            (Algorithm::Lr2, Eat) => 6,
            (Algorithm::Lr2, RemoveRequests) => 7,
            (Algorithm::Lr2, SignGuestBooks) => 8,
            (Algorithm::Lr2, ReleaseBoth) => 9,
            (Algorithm::Gdp1, Choose) => 2,
            (Algorithm::Gdp1, TakeFirst) => 3,
            (Algorithm::Gdp1, Relabel) => 4,
            (Algorithm::Gdp1, TakeSecond) => 5,
            (Algorithm::Gdp1, Eat) => 6,
            (Algorithm::Gdp1, ReleaseBoth) => 7,
            (Algorithm::Gdp2, RequestLeft | RequestRight) => 2,
            (Algorithm::Gdp2, Choose) => 3,
            (Algorithm::Gdp2, TakeFirst) => 4,
            (Algorithm::Gdp2, Relabel) => 5,
            (Algorithm::Gdp2, TakeSecond) => 6,
            (Algorithm::Gdp2, Eat) => 7,
            (Algorithm::Gdp2, RemoveRequests) => 8,
            (Algorithm::Gdp2, SignGuestBooks) => 9,
            (Algorithm::Gdp2, ReleaseBoth) => 10,
            _ => return None,
        };
        Some(line)
    }

    /// Between getting hungry and starting to eat.
    pub fn is_trying(self) -> bool {
        use Pc::*;
        matches!(self, RequestLeft | RequestRight | Choose | TakeFirst | Relabel | TakeSecond)
    }

    /// Number of forks a philosopher at this label holds.
    pub fn forks_held(self) -> usize {
        use Pc::*;
        match self {
            Relabel | TakeSecond => 1,
            Eat | RemoveRequests | SignGuestBooks | ReleaseBoth => 2,
            _ => 0,
        }
    }

    /// Whether a first-fork commitment is recorded at this label.
    pub fn has_commitment(self) -> bool {
        use Pc::*;
        matches!(
            self,
            TakeFirst | Relabel | TakeSecond | Eat | RemoveRequests | SignGuestBooks | ReleaseBoth
        )
    }

    pub fn as_str(self) -> &'static str {
        use Pc::*;
        match self {
            Think => "think",
            RequestLeft => "requestLeft",
            RequestRight => "requestRight",
            Choose => "choose",
            TakeFirst => "takeFirst",
            Relabel => "relabel",
            TakeSecond => "takeSecond",
            Eat => "eat",
            RemoveRequests => "removeRequests",
            SignGuestBooks => "signGuestBooks",
            ReleaseBoth => "releaseBoth",
        }
    }
}

impl fmt::Display for Pc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
