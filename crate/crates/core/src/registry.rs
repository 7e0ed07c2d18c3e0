//! Name-keyed registries of interchangeable strategies.

use crate::error::{Error, Result};

/// Constructors of boxed trait objects, looked up by name.
pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: Vec<(&'static str, fn() -> Box<T>)>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self { kind, entries: Vec::new() }
    }

    pub fn register(mut self, name: &'static str, ctor: fn() -> Box<T>) -> Self {
        self.entries.retain(|(n, _)| *n != name);
        self.entries.push((name, ctor));
        self
    }

    pub fn create(&self, name: &str) -> Result<Box<T>> {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, ctor)| ctor())
            .ok_or_else(|| Error::Config(format!("unknown {} '{}' (known: {})", self.kind, name, self.names().join(", "))))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Shape {
        fn sides(&self) -> u32;
    }
    struct Tri;
    impl Shape for Tri {
        fn sides(&self) -> u32 {
            3
        }
    }

    #[test]
    fn lookup_by_name() {
        let r: Registry<dyn Shape> = Registry::new("shape").register("tri", || Box::new(Tri));
        assert_eq!(r.create("tri").unwrap().sides(), 3);
        assert!(matches!(r.create("square"), Err(Error::Config(_))));
        assert_eq!(r.names(), vec!["tri"]);
    }
}
