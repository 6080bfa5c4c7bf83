use std::fmt;

/// Kleene three-valued truth values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bool3 {
    True,
    False,
    Unknown,
}

impl Bool3 {
    pub const ALL: [Bool3; 3] = [Bool3::True, Bool3::False, Bool3::Unknown];

    pub fn and(self, o: Bool3) -> Bool3 {
        match (self, o) {
            (Bool3::False, _) | (_, Bool3::False) => Bool3::False,
            (Bool3::True, Bool3::True) => Bool3::True,
            _ => Bool3::Unknown,
        }
    }

    pub fn or(self, o: Bool3) -> Bool3 {
        match (self, o) {
            (Bool3::True, _) | (_, Bool3::True) => Bool3::True,
            (Bool3::False, Bool3::False) => Bool3::False,
            _ => Bool3::Unknown,
        }
    }

    pub fn not(self) -> Bool3 {
        match self {
            Bool3::True => Bool3::False,
            Bool3::False => Bool3::True,
            Bool3::Unknown => Bool3::Unknown,
        }
    }

    pub fn from_bool(b: bool) -> Bool3 {
        if b { Bool3::True } else { Bool3::False }
    }

    /// Position in the information order: unknown below the two others.
    pub fn informative(self) -> bool {
        self != Bool3::Unknown
    }
}

impl fmt::Display for Bool3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bool3::True => "true",
            Bool3::False => "false",
            Bool3::Unknown => "unknown",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Bool3::*;

    #[test]
    fn kleene_laws() {
        assert_eq!(True.or(Unknown), True);
        assert_eq!(False.or(Unknown), Unknown);
        assert_eq!(False.and(Unknown), False);
        for a in Bool3::ALL {
            assert_eq!(a.not().not(), a);
            for b in Bool3::ALL {
                assert_eq!(a.and(b), b.and(a));
                assert_eq!(a.or(b), b.or(a));
                assert_eq!(a.and(b).not(), a.not().or(b.not()));
                for c in Bool3::ALL {
                    assert_eq!(a.and(b).and(c), a.and(b.and(c)));
                    assert_eq!(a.or(b).or(c), a.or(b.or(c)));
                }
                // refining unknown never changes an informative result
                if a == Unknown {
                    for r in [True, False] {
                        if a.and(b).informative() {
                            assert_eq!(r.and(b), a.and(b));
                        }
                        if a.or(b).informative() {
                            assert_eq!(r.or(b), a.or(b));
                        }
                    }
                }
            }
        }
    }
}
