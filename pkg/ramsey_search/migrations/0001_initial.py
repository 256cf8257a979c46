# Generated by Django 5.2.6 on 2026-10-17 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='SearchRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('out_prefix', models.CharField(help_text='Prefix of the .cert, .stats.csv and .ckpt.json files', max_length=500)),
                ('config_json', models.JSONField(help_text='Trainer configuration the run used')),
                ('seed', models.BigIntegerField(default=0)),
                ('restart', models.IntegerField(default=0)),
                ('resumed', models.BooleanField(default=False)),
                ('status', models.CharField(choices=[('running', 'Running - search in progress'), ('certified', 'Certified - critical coloring found'), ('exhausted', 'Exhausted - batch budget spent'), ('failed', 'Failed - run aborted with an error')], default='running', max_length=20)),
                ('batches_run', models.IntegerField(default=0)),
                ('best_reward', models.BigIntegerField(blank=True, null=True)),
                ('best_coloring', models.TextField(blank=True, default='', help_text="Best coloring in compact 'n m digits' form")),
                ('certificate_text', models.TextField(blank=True, default='')),
                ('error_message', models.TextField(blank=True, null=True)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('updated_at', models.DateTimeField(auto_now=True)),
            ],
            options={
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['created_at'], name='searchrun_created_idx'), models.Index(fields=['status'], name='searchrun_status_idx'), models.Index(fields=['out_prefix', 'restart'], name='searchrun_prefix_idx')],
            },
        ),
    ]
