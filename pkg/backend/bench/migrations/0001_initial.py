# Generated by Django 5.0.7 on 2026-10-17 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='BenchRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('created_at', models.DateTimeField(auto_now_add=True, help_text='Creation time')),
                ('updated_at', models.DateTimeField(auto_now=True, help_text='Last update time')),
                ('kind', models.CharField(choices=[('run', 'Benchmark grid'), ('sweep-tolerance', 'Tolerance sweep'), ('time', 'Timing')], default='run', help_text='Bench subcommand', max_length=32)),
                ('config_digest', models.CharField(help_text='Digest of the normalized configuration', max_length=64)),
                ('seed', models.BigIntegerField(default=0, help_text='Run-level seed')),
                ('status', models.CharField(choices=[('success', 'Success'), ('partial', 'Partial'), ('failed', 'Failed')], help_text='Outcome of the run', max_length=16)),
                ('n_cells', models.IntegerField(default=0, help_text='Number of cells or rows')),
                ('n_failed', models.IntegerField(default=0, help_text='Number of failed cells or rows')),
                ('report_path', models.CharField(blank=True, help_text='Path of the written artifact', max_length=1024)),
                ('summary', models.JSONField(blank=True, default=dict, help_text='Summary of the run')),
            ],
            options={
                'ordering': ['-created_at'],
                'abstract': False,
                'indexes': [models.Index(fields=['-created_at'], name='bench_bench_created_3c1a0e_idx'), models.Index(fields=['config_digest'], name='bench_bench_config__8b0f52_idx'), models.Index(fields=['kind', 'status'], name='bench_bench_kind_5d9e27_idx')],
            },
        ),
    ]
