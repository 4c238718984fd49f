_base_ = ['desk_tiny_base.py']

seed = 3
output_dir = 'runs/desk_tiny'
train = {'epochs': 2}
sweep = {'target_private': [1, 2]}
