//! Execution records: one flat JSON object per line carrying the eight
//! input fields and the observed amount, e.g.
//!
//! ```text
//! {"citizenship":0,"state":0,"region":3,"sex":0,"age":30,"marital":1,"dependents":0,"income":2,"amount":15500}
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subject::{CustomerRecord, MAX_AMOUNT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExecutionRecord {
    pub input: CustomerRecord,
    pub amount: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    citizenship: i64,
    state: i64,
    region: i64,
    sex: i64,
    age: i64,
    marital: i64,
    dependents: i64,
    income: i64,
    amount: i64,
}

impl ExecutionRecord {
    pub fn parse_line(line: &str) -> Result<Self> {
        let raw: RawRecord = serde_json::from_str(line)?;
        let input = CustomerRecord::from_fields([
            raw.citizenship,
            raw.state,
            raw.region,
            raw.sex,
            raw.age,
            raw.marital,
            raw.dependents,
            raw.income,
        ])?;
        if !(0..=i64::from(MAX_AMOUNT)).contains(&raw.amount) {
            return Err(Error::domain(format!(
                "amount {} outside 0..={MAX_AMOUNT}",
                raw.amount
            )));
        }
        Ok(ExecutionRecord {
            input,
            amount: raw.amount as u32,
        })
    }

    pub fn to_line(&self) -> String {
        let x = &self.input;
        let raw = RawRecord {
            citizenship: x.citizenship.into(),
            state: x.state.into(),
            region: x.region.into(),
            sex: x.sex.into(),
            age: x.age.into(),
            marital: x.marital.into(),
            dependents: x.dependents.into(),
            income: x.income.into(),
            amount: self.amount.into(),
        };
        serde_json::to_string(&raw).expect("plain integers serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_example() {
        let r = ExecutionRecord::parse_line(
            r#"{"citizenship":0,"state":0,"region":3,"sex":0,"age":30,"marital":1,"dependents":0,"income":2,"amount":15500}"#,
        )
        .unwrap();
        assert_eq!(r.amount, 15500);
        assert_eq!(r.input.region, 3);
    }

    #[test]
    fn rejects_malformed() {
        let bad_region = r#"{"citizenship":0,"state":0,"region":9,"sex":0,"age":30,"marital":1,"dependents":0,"income":2,"amount":1}"#;
        assert!(matches!(
            ExecutionRecord::parse_line(bad_region),
            Err(Error::FieldRange { field: "region", .. })
        ));
        let missing = r#"{"citizenship":0,"state":0,"region":1}"#;
        assert!(ExecutionRecord::parse_line(missing).is_err());
        let extra = r#"{"citizenship":0,"state":0,"region":1,"sex":0,"age":30,"marital":1,"dependents":0,"income":2,"amount":1,"x":1}"#;
        assert!(ExecutionRecord::parse_line(extra).is_err());
        let big = r#"{"citizenship":0,"state":0,"region":1,"sex":0,"age":30,"marital":1,"dependents":0,"income":2,"amount":18001}"#;
        assert!(ExecutionRecord::parse_line(big).is_err());
        assert!(ExecutionRecord::parse_line("not json").is_err());
    }

    proptest! {
        #[test]
        fn line_round_trip(i in 0usize..crate::subject::DOMAIN_SIZE, amount in 0u32..=MAX_AMOUNT) {
            let r = ExecutionRecord { input: CustomerRecord::from_index(i).unwrap(), amount };
            prop_assert_eq!(ExecutionRecord::parse_line(&r.to_line()).unwrap(), r);
        }
    }
}
