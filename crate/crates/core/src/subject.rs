//! The credit-approval subject program and its mutants.
//!
//! [`approve`] is a line-by-line transcription of the reference program.
//! Every mutant replaces exactly one predicate; they are written out as
//! explicit alternatives at each predicate site so the listing in
//! [`MUTANTS`] can be checked against the code by eye.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest credit amount the program can return.
pub const MAX_AMOUNT: u32 = 18_000;

/// Number of distinct customer records.
pub const DOMAIN_SIZE: usize = 224_000;

/// Field names in enumeration order.
pub const FIELD_NAMES: [&str; 8] = [
    "citizenship",
    "state",
    "region",
    "sex",
    "age",
    "marital",
    "dependents",
    "income",
];

/// Inclusive upper bound of each field, in [`FIELD_NAMES`] order. Every
/// field starts at 0.
pub const FIELD_MAX: [u8; 8] = [1, 1, 6, 1, 99, 1, 4, 3];

/// The eight discrete inputs of the subject program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CustomerRecord {
    pub citizenship: u8,
    pub state: u8,
    pub region: u8,
    pub sex: u8,
    pub age: u8,
    pub marital: u8,
    pub dependents: u8,
    pub income: u8,
}

impl CustomerRecord {
    /// Builds a record from field values in [`FIELD_NAMES`] order, checking ranges.
    pub fn from_fields(fields: [i64; 8]) -> Result<Self> {
        for (i, &value) in fields.iter().enumerate() {
            if value < 0 || value > i64::from(FIELD_MAX[i]) {
                return Err(Error::FieldRange {
                    field: FIELD_NAMES[i],
                    value,
                    max: FIELD_MAX[i],
                });
            }
        }
        let f = fields.map(|v| v as u8);
        Ok(CustomerRecord {
            citizenship: f[0],
            state: f[1],
            region: f[2],
            sex: f[3],
            age: f[4],
            marital: f[5],
            dependents: f[6],
            income: f[7],
        })
    }

    pub fn fields(&self) -> [u8; 8] {
        [
            self.citizenship,
            self.state,
            self.region,
            self.sex,
            self.age,
            self.marital,
            self.dependents,
            self.income,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        Self::from_fields(self.fields().map(i64::from)).map(|_| ())
    }

    /// Position of this record in [`enumerate_domain`] order.
    pub fn index(&self) -> usize {
        self.fields()
            .iter()
            .zip(FIELD_MAX)
            .fold(0usize, |acc, (&v, max)| acc * (max as usize + 1) + v as usize)
    }

    /// Inverse of [`CustomerRecord::index`].
    pub fn from_index(index: usize) -> Result<Self> {
        if index >= DOMAIN_SIZE {
            return Err(Error::domain(format!(
                "record index {index} outside 0..{DOMAIN_SIZE}"
            )));
        }
        let mut rest = index;
        let mut fields = [0i64; 8];
        for i in (0..8).rev() {
            let radix = FIELD_MAX[i] as usize + 1;
            fields[i] = (rest % radix) as i64;
            rest /= radix;
        }
        Self::from_fields(fields)
    }
}

/// Output of the subject program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Decision {
    pub approved: bool,
    pub amount: u32,
}

/// Every record of the input domain, lexicographically over
/// (citizenship, state, region, sex, age, marital, dependents, income),
/// income varying fastest.
pub fn enumerate_domain() -> impl Iterator<Item = CustomerRecord> + Clone {
    (0..DOMAIN_SIZE).map(|i| CustomerRecord::from_index(i).expect("index in range"))
}

/// Identifier of one of the 21 mutants, `M1` to `M21`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct MutantId(u8);

impl MutantId {
    pub const COUNT: usize = 21;

    pub fn new(id: i64) -> Result<Self> {
        if (1..=Self::COUNT as i64).contains(&id) {
            Ok(MutantId(id as u8))
        } else {
            Err(Error::UnknownMutant(id))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = MutantId> + Clone {
        (1..=Self::COUNT as u8).map(MutantId)
    }

    pub fn info(self) -> &'static MutantInfo {
        &MUTANTS[self.0 as usize - 1]
    }
}

impl TryFrom<u8> for MutantId {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        MutantId::new(i64::from(value))
    }
}

impl From<MutantId> for u8 {
    fn from(id: MutantId) -> u8 {
        id.0
    }
}

impl fmt::Display for MutantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M{}", self.0)
    }
}

/// One row of the mutant table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MutantInfo {
    pub id: u8,
    /// Line of the reference listing holding the mutated predicate.
    pub line: u32,
    pub original: &'static str,
    pub mutated: &'static str,
}

const fn row(id: u8, line: u32, original: &'static str, mutated: &'static str) -> MutantInfo {
    MutantInfo {
        id,
        line,
        original,
        mutated,
    }
}

pub static MUTANTS: [MutantInfo; 21] = [
    row(1, 2, "Region==5 || Region==6", "Region==5"),
    row(2, 2, "Region==5 || Region==6", "Region==5 && Region==6"),
    row(3, 2, "Region==5 || Region==6", "Region==4 || Region==5"),
    row(4, 2, "Region==5 || Region==6", "Region==3 || Region==4"),
    row(5, 3, "Age<18", "Age>18"),
    row(6, 3, "Age<18", "Age<25"),
    row(7, 5, "Citizenship==0", "Citizenship==1"),
    row(8, 7, "State==0", "State==1"),
    row(9, 8, "Region==3 || Region==4", "Region==3"),
    row(10, 8, "Region==3 || Region==4", "Region==3 && Region==4"),
    row(11, 8, "Region==3 || Region==4", "Region==2 || Region==3"),
    row(12, 8, "Region==3 || Region==4", "Region==1 || Region==2"),
    row(13, 11, "Marital==0", "Marital==1"),
    row(14, 12, "Dependents>0", "Dependents==0"),
    row(15, 12, "Dependents>0", "Dependents<0"),
    row(16, 15, "Sex==0", "Sex==1"),
    row(17, 20, "Marital==0", "Marital==1"),
    row(18, 21, "Dependents>2", "Dependents>=2"),
    row(19, 21, "Dependents>2", "Dependents<2"),
    row(20, 21, "Dependents>2", "Dependents<=2"),
    row(21, 24, "Sex==0", "Sex==1"),
];

/// The reference credit-approval program.
pub fn approve(x: &CustomerRecord) -> Result<Decision> {
    x.validate()?;
    Ok(run(None, x))
}

/// The program with mutant `id`'s predicate substituted.
pub fn mutant(id: MutantId, x: &CustomerRecord) -> Result<Decision> {
    x.validate()?;
    Ok(run(Some(id.get()), x))
}

/// Whether mutant `id` returns a different amount than [`approve`] on `x`.
/// The approval flag is not compared.
pub fn is_exposing(id: MutantId, x: &CustomerRecord) -> Result<bool> {
    Ok(mutant(id, x)?.amount != approve(x)?.amount)
}

/// `(int)` cast of the reference program: truncation toward zero.
fn truncate(v: f64) -> i64 {
    v.trunc() as i64
}

fn run(m: Option<u8>, x: &CustomerRecord) -> Decision {
    let region = x.region;
    let dependents = i64::from(x.dependents);
    let income = i64::from(x.income);

    // line 2
    let no_credit_region = match m {
        Some(1) => region == 5,
        Some(2) => region == 5 && region == 6,
        Some(3) => region == 4 || region == 5,
        Some(4) => region == 3 || region == 4,
        _ => region == 5 || region == 6,
    };
    // line 3
    let underage = match m {
        Some(5) => x.age > 18,
        Some(6) => x.age < 25,
        _ => x.age < 18,
    };

    let amount: i64 = if no_credit_region || underage {
        0
    } else {
        // line 5
        let citizen = match m {
            Some(7) => x.citizenship == 1,
            _ => x.citizenship == 0,
        };
        if citizen {
            let mut amount = 5000 + 1000 * income;
            // line 7
            let home_state = match m {
                Some(8) => x.state == 1,
                _ => x.state == 0,
            };
            if home_state {
                // line 8
                let doubled_region = match m {
                    Some(9) => region == 3,
                    Some(10) => region == 3 && region == 4,
                    Some(11) => region == 2 || region == 3,
                    Some(12) => region == 1 || region == 2,
                    _ => region == 3 || region == 4,
                };
                if doubled_region {
                    amount *= 2;
                } else {
                    amount = truncate(amount as f64 * 1.50);
                }
            } else {
                amount = truncate(amount as f64 * 1.10);
            }
            // line 11
            let single = match m {
                Some(13) => x.marital == 1,
                _ => x.marital == 0,
            };
            if single {
                // line 12
                let has_dependents = match m {
                    Some(14) => dependents == 0,
                    Some(15) => dependents < 0,
                    _ => dependents > 0,
                };
                if has_dependents {
                    amount += 200 * dependents;
                } else {
                    amount += 500;
                }
            } else {
                amount += 1000;
            }
            // line 15
            let sex0 = match m {
                Some(16) => x.sex == 1,
                _ => x.sex == 0,
            };
            if sex0 {
                amount += 500;
            } else {
                amount += 1000;
            }
            amount
        } else {
            let mut amount = 1000 + 800 * income;
            // line 20
            let single = match m {
                Some(17) => x.marital == 1,
                _ => x.marital == 0,
            };
            if single {
                // line 21
                let many_dependents = match m {
                    Some(18) => dependents >= 2,
                    Some(19) => dependents < 2,
                    Some(20) => dependents <= 2,
                    _ => dependents > 2,
                };
                if many_dependents {
                    amount += 100 * dependents;
                } else {
                    amount += 100;
                }
            } else {
                amount += 300;
            }
            // line 24
            let sex0 = match m {
                Some(21) => x.sex == 1,
                _ => x.sex == 0,
            };
            if sex0 {
                amount += 100;
            } else {
                amount += 200;
            }
            amount
        }
    };

    Decision {
        approved: amount != 0,
        amount: amount as u32,
    }
}
