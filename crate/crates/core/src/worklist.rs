use std::collections::VecDeque;

/// Order in which pending deletions are processed. The fixpoint does not
/// depend on it; the choice is exposed so that claim can be tested.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Discipline {
    #[default]
    Fifo,
    Lifo,
}

#[derive(Clone, Debug)]
pub struct Worklist<T> {
    items: VecDeque<T>,
    discipline: Discipline,
}

impl<T> Worklist<T> {
    pub fn new(discipline: Discipline) -> Self {
        Self {
            items: VecDeque::new(),
            discipline,
        }
    }

    pub fn push(&mut self, item: T) {
        self.items.push_back(item);
    }

    pub fn pop(&mut self) -> Option<T> {
        match self.discipline {
            Discipline::Fifo => self.items.pop_front(),
            Discipline::Lifo => self.items.pop_back(),
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}
