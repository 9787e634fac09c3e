# distgraph-lab Tests
