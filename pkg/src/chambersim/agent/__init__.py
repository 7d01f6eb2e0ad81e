"""DQN mobility controller: value network, replay, policies, training."""
