//! Priest's three-valued logic: truth values T, B, F with B read as
//! "both". Disjunction is the maximum and conjunction the minimum under
//! F < B < T; negation swaps T and F and fixes B. A value is designated
//! (counts as holding) when it is not F.

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tri {
    F,
    B,
    T,
}

impl Tri {
    pub fn not(self) -> Tri {
        match self {
            Tri::T => Tri::F,
            Tri::B => Tri::B,
            Tri::F => Tri::T,
        }
    }

    pub fn and(self, other: Tri) -> Tri {
        self.min(other)
    }

    pub fn or(self, other: Tri) -> Tri {
        self.max(other)
    }

    pub fn designated(self) -> bool {
        self != Tri::F
    }
}

#[cfg(test)]
mod tests {
    use super::Tri::{B, F, T};
    use super::*;

    #[test]
    fn truth_table_all_cells() {
        let or_rows = [
            (T, T, T),
            (T, B, T),
            (T, F, T),
            (B, T, T),
            (B, B, B),
            (B, F, B),
            (F, T, T),
            (F, B, B),
            (F, F, F),
        ];
        for (a, b, want) in or_rows {
            assert_eq!(a.or(b), want, "{a:?} or {b:?}");
        }
        let and_rows = [
            (T, T, T),
            (T, B, B),
            (T, F, F),
            (B, T, B),
            (B, B, B),
            (B, F, F),
            (F, T, F),
            (F, B, F),
            (F, F, F),
        ];
        for (a, b, want) in and_rows {
            assert_eq!(a.and(b), want, "{a:?} and {b:?}");
        }
        assert_eq!(T.not(), F);
        assert_eq!(B.not(), B);
        assert_eq!(F.not(), T);
    }

    #[test]
    fn classical_corner_is_preserved() {
        for a in [T, F] {
            for b in [T, F] {
                let ca = a == T;
                let cb = b == T;
                assert_eq!(a.or(b) == T, ca || cb);
                assert_eq!(a.and(b) == T, ca && cb);
            }
        }
    }
}
